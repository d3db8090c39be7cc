"""Command-line harness.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from pathlib import Path

from .config import ExperimentConfig, load_config, parse_grid
from .errors import EigenlinkError, UsageError
from .experiments import (
    evaluate,
    loglog_slope,
    summary,
    sweep,
    time_scoring,
    write_json,
    write_runs_csv,
)
from .graph import erdos_renyi, network_stats, rewire_degree_preserving
from .registry import load_dataset
from .similarity import PARAMS, IndexConfig, IndexId
from .spectral import MAX_PAIRS, spectrum_table, top_eigenpairs

log = logging.getLogger("eigenlink")

STATS_COLUMNS = ["network", "N", "M", "rho", "k", "c", "l", "sigma", "delta", "lcc"]
DEFAULT_EVAL_INDICES = ["CLE", "SCF_CN", "SCF_AA", "SCF_RA", "SCF_CRA", "CN", "AA", "RA", "CRA"]
DEFAULT_TIME_INDICES = ["CN", "RA", "CLE", "CLE_STAR:alpha=0.5", "KATZ:beta=0.01", "LO:alpha=0.1"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", action="append", help="dataset name, synthetic spec or file (repeatable)")
    p.add_argument("--config", type=Path, help="experiment config file")
    p.add_argument("--manifest", type=Path, help="dataset manifest (default: $EIGENLINK_MANIFEST)")
    p.add_argument("--seed", type=int, help="base seed; run r uses seed+r")
    p.add_argument("--runs", type=int, help="independent runs per configuration")
    p.add_argument("--test-fraction", type=float, action="append", dest="test_fraction",
                   help="fraction of links held out (repeatable)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--workers", type=int)
    p.add_argument("--auc-mode", choices=["exact", "sampled"])
    p.add_argument("--auc-n", type=int, help="samples for --auc-mode sampled")
    p.add_argument("--dense-cap", type=int, help="largest N for Katz/LO dense evaluation")
    p.add_argument("--index", action="append", help="index, e.g. CLE or CLE_STAR:alpha=0.4 (repeatable)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eigenlink", description="Eigenvector-controlled link prediction benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="structural statistics and eigengap per dataset")
    _common(p)

    p = sub.add_parser("spectrum", help="leading eigenvalues and CN correlation per component")
    _common(p)
    p.add_argument("--k", type=int, default=10, help=f"eigenpairs to report (<= {MAX_PAIRS})")

    p = sub.add_parser("eval", help="AUC/AUPR over repeated random splits")
    _common(p)

    p = sub.add_parser("sweep", help="parameter sweep of one index")
    _common(p)
    p.add_argument("--grid", help="values, e.g. '0:1:0.05' or '0.1 0.2 0.5'")
    p.add_argument("--no-reference", action="store_true",
                   help="skip the CLE / SCF_CN reference rows in CLE_STAR sweeps")

    p = sub.add_parser("time", help="scoring time versus network size")
    _common(p)
    p.add_argument("--sizes", default="500 1000 2000 4000")
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--repeats", type=int, default=1)

    p = sub.add_parser("null", help="statistics of a degree-preserving randomization")
    _common(p)
    p.add_argument("--swaps", type=int, help="swap attempts (default 10*M)")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    indices = None
    if args.index:
        try:
            indices = [IndexConfig.parse(t) for t in args.index]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return cfg.updated(
        datasets=args.dataset,
        indices=indices,
        test_fractions=args.test_fraction,
        n_runs=args.runs,
        base_seed=args.seed,
        auc_mode=args.auc_mode,
        auc_n=args.auc_n,
        dense_cap=args.dense_cap,
        workers=args.workers,
        out_dir=args.out,
        manifest=args.manifest,
    )


def _graphs(cfg: ExperimentConfig) -> dict:
    if not cfg.datasets:
        raise UsageError("no dataset given (use --dataset or a config file)")
    graphs = {}
    for name in cfg.datasets:
        try:
            graphs[name] = load_dataset(name, cfg.manifest)
        except EigenlinkError as exc:
            raise type(exc)(f"{name}: {exc}") from None
    return graphs


def _emit_csv(rows: list[dict], columns: list[str], out_dir: Path | None, filename: str) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in (row[c] for c in columns)])
    text = buf.getvalue()
    sys.stdout.write(text)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / filename).write_text(text, encoding="utf-8")


def _stats_row(name, g, seed) -> dict:
    st = network_stats(g)
    row = {"network": name, **st.as_row()}
    row["delta"] = top_eigenpairs(g, 2, seed=seed).delta
    return row


def cmd_stats(args) -> int:
    cfg = _config(args)
    rows = [_stats_row(name, g, cfg.base_seed) for name, g in _graphs(cfg).items()]
    _emit_csv(rows, STATS_COLUMNS, cfg.out_dir, "stats.csv")
    return 0


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    if not 1 <= args.k <= MAX_PAIRS:
        raise UsageError(f"--k must lie in 1..{MAX_PAIRS}")
    rows = []
    for name, g in _graphs(cfg).items():
        s = top_eigenpairs(g, min(args.k, g.n), seed=cfg.base_seed)
        for row in spectrum_table(g, s):
            rows.append({"network": name, **row})
    _emit_csv(rows, ["network", "d", "lambda", "lambda_sq", "r", "degenerate"], cfg.out_dir,
              "spectrum.csv")
    return 0


def _write_reports(reports, cfg: ExperimentConfig, extra: dict | None = None, stem: str = "",
                   echo: bool = True) -> None:
    buf = io.StringIO()
    write_runs_csv(reports, buf, timings=False)
    if echo:
        sys.stdout.write(_table(reports))
    if cfg.out_dir is None:
        return
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / f"{stem}metrics.csv").write_text(buf.getvalue(), encoding="utf-8")
    with open(cfg.out_dir / f"{stem}runs.csv", "w", encoding="utf-8") as fh:
        write_runs_csv(reports, fh)
    with open(cfg.out_dir / f"{stem}summary.json", "w", encoding="utf-8") as fh:
        write_json({**summary(reports), **(extra or {})}, fh)


def _table(reports) -> str:
    lines = [f"{'network':<12} {'index':<24} {'frac':>5} {'runs':>5} {'AUC':>8} {'AUPR':>8}"]
    for r in reports:
        a = r.aggregate()
        lines.append(f"{r.network:<12} {r.config.label:<24} {r.test_fraction:>5.2f} "
                     f"{a['runs']:>5d} {a['mean_auc']:>8.4f} {a['mean_aupr']:>8.4f}")
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    cfg = _config(args)
    graphs = _graphs(cfg)
    configs = cfg.indices or [IndexConfig.parse(t) for t in DEFAULT_EVAL_INDICES]
    reports = []
    for frac in cfg.test_fractions:
        reports += evaluate(graphs, configs, cfg.seeds(), frac, cfg.auc_mode, cfg.auc_n,
                            cfg.dense_cap, cfg.workers)
    for rep in reports:
        if rep.failures:
            print(f"warning: {rep.network} {rep.config.label}: {len(rep.failures)} of "
                  f"{len(rep.failures) + rep.n_ok} runs failed", file=sys.stderr)
    _write_reports(reports, cfg)
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    graphs = _graphs(cfg)
    if cfg.indices:
        if len(cfg.indices) != 1:
            raise UsageError("sweep takes exactly one --index")
        index_id = cfg.indices[0].index_id
    elif len(cfg.grids) == 1:
        index_id = next(iter(cfg.grids))
    else:
        index_id = IndexId.CLE_STAR
    if index_id not in PARAMS:
        raise UsageError(f"{index_id.value} has no parameter to sweep")
    grid = parse_grid(args.grid) if args.grid else cfg.grids.get(index_id)
    if not grid:
        if index_id is IndexId.CLE_STAR or index_id is IndexId.TILDE_STAR:
            grid = parse_grid("0:1:0.05")
        else:
            raise UsageError(f"no grid for {index_id.value} (use --grid or a [grid] section)")
    base = IndexConfig(index_id, **{PARAMS[index_id]: grid[0]})
    refs = []
    if index_id is IndexId.CLE_STAR and not args.no_reference:
        refs = [IndexConfig(IndexId.CLE), IndexConfig(IndexId.SCF_CN)]
    all_reports, curves, best = [], [], {}
    for frac in cfg.test_fractions:
        reports, curve, b = sweep(graphs, base, grid, cfg.seeds(), frac, cfg.auc_mode, cfg.auc_n,
                                  cfg.dense_cap, cfg.workers, refs)
        all_reports += reports
        curves += curve
        best[repr(frac)] = b
    cols = ["network", "index", "test_fraction", "param", "value", "reference", "runs", "failed",
            "mean_auc", "std_auc", "mean_aupr", "std_aupr", "mean_delta"]
    _emit_csv(curves, cols, cfg.out_dir, "sweep.csv")
    if cfg.out_dir is not None:
        _write_reports(all_reports, cfg, {"optimum": best}, stem="sweep_", echo=False)
    return 0


def cmd_time(args) -> int:
    cfg = _config(args)
    sizes = [int(s) for s in parse_grid(args.sizes)]
    configs = cfg.indices or [IndexConfig.parse(t) for t in DEFAULT_TIME_INDICES]
    rows = []
    for n in sizes:
        m = int(round(args.avg_degree * n / 2))
        g = erdos_renyi(n, m, cfg.base_seed)
        for c in configs:
            try:
                secs = time_scoring(g, c, cfg.dense_cap, args.repeats)
            except EigenlinkError as exc:
                print(f"warning: {c.label} at N={n}: {exc}", file=sys.stderr)
                secs = math.nan
            rows.append({"index": c.label, "N": n, "M": g.m, "seconds": secs})
    _emit_csv(rows, ["index", "N", "M", "seconds"], cfg.out_dir, "timing.csv")
    slopes = {}
    for c in configs:
        pts = [(r["N"], r["seconds"]) for r in rows if r["index"] == c.label and r["seconds"] > 0]
        if len(pts) >= 2:
            slopes[c.label] = loglog_slope(*zip(*pts))
    for label, s in slopes.items():
        print(f"slope {label}: {s:.3f}", file=sys.stderr)
    if cfg.out_dir is not None:
        with open(cfg.out_dir / "timing_slopes.json", "w", encoding="utf-8") as fh:
            write_json(slopes, fh)
    return 0


def cmd_null(args) -> int:
    cfg = _config(args)
    rows = []
    for name, g in _graphs(cfg).items():
        orig = _stats_row(name, g, cfg.base_seed)
        orig["model"] = "original"
        orig["accepted_swaps"] = 0
        rewired, accepted = rewire_degree_preserving(g, args.swaps, cfg.base_seed, return_accepted=True)
        row = _stats_row(name, rewired, cfg.base_seed)
        row["model"] = "rewired"
        row["accepted_swaps"] = accepted
        rows += [orig, row]
    _emit_csv(rows, ["network", "model", "accepted_swaps"] + STATS_COLUMNS[1:], cfg.out_dir, "null.csv")
    return 0


COMMANDS = {
    "stats": cmd_stats,
    "spectrum": cmd_spectrum,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "time": cmd_time,
    "null": cmd_null,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except EigenlinkError as exc:
        print(f"eigenlink {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"eigenlink {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
