"""Dataset lookup: synthetic generators, a manifest of local files, or a path.

Manifest format, one dataset per line (``#`` starts a comment)::

    # name   path                 [N     M]
    FTB      data/football.txt    35    118
    DNC      data/dnc.edges

Paths are relative to the manifest's directory. When ``N M`` are given
the loaded graph must match them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError
from .graph import Graph, complete_graph, erdos_renyi, path_graph, read_edge_list, ring_graph, star_graph

MANIFEST_ENV = "EIGENLINK_MANIFEST"

_SYNTHETIC = {
    "complete": (complete_graph, 1),
    "ring": (ring_graph, 1),
    "star": (star_graph, 1),
    "path": (path_graph, 1),
    "er": (erdos_renyi, 3),
}


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    path: Path
    n: int | None = None
    m: int | None = None


def read_manifest(path) -> dict[str, DatasetEntry]:
    path = Path(path)
    base = path.parent
    entries: dict[str, DatasetEntry] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            tok = s.split()
            if len(tok) not in (2, 4):
                raise DataError(f"{path}:{lineno}: expected 'name path [N M]'")
            p = Path(tok[1])
            if not p.is_absolute():
                p = base / p
            n = m = None
            if len(tok) == 4:
                n, m = int(tok[2]), int(tok[3])
            entries[tok[0]] = DatasetEntry(tok[0], p, n, m)
    return entries


def default_manifest() -> Path | None:
    env = os.environ.get(MANIFEST_ENV)
    return Path(env) if env else None


def _synthetic(spec: str) -> Graph | None:
    kind, _, rest = spec.partition(":")
    if kind not in _SYNTHETIC or not rest:
        return None
    fn, nargs = _SYNTHETIC[kind]
    args = [int(a) for a in rest.split(":")]
    if kind == "er" and len(args) == 2:
        args.append(0)
    if len(args) != nargs:
        raise DataError(f"synthetic dataset {spec!r}: expected {nargs} integer argument(s)")
    return fn(*args)


def load_dataset(spec: str, manifest=None) -> Graph:
    """Resolve ``spec`` as a synthetic generator (``complete:5``, ``ring:10``,
    ``star:3``, ``path:4``, ``er:N:M[:seed]``), a manifest name, or a file."""
    g = _synthetic(spec)
    if g is not None:
        return g
    manifest = manifest if manifest is not None else default_manifest()
    if manifest is not None and Path(manifest).exists():
        entries = read_manifest(manifest)
        if spec in entries:
            e = entries[spec]
            if not e.path.exists():
                raise DataError(f"dataset {spec!r}: file {e.path} not found")
            g = read_edge_list(e.path)
            if e.n is not None and (g.n, g.m) != (e.n, e.m):
                raise DataError(f"dataset {spec!r}: expected N={e.n}, M={e.m}, got N={g.n}, M={g.m}")
            return g
    if os.path.exists(spec):
        return read_edge_list(spec)
    raise DataError(f"unknown dataset {spec!r}")


def dataset_available(spec: str, manifest=None) -> bool:
    try:
        load_dataset(spec, manifest)
    except DataError:
        return False
    return True
