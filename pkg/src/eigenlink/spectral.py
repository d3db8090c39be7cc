"""Leading eigenpairs of the adjacency matrix.

Eigenpairs are ranked by squared eigenvalue, so the bipartite pair
``(lambda, -lambda)`` is a tie; ties go to the positive eigenvalue, which
keeps ``v_1`` the Perron vector. The eigensolver is Lanczos with full
reorthogonalization. Repeated eigenvalues are recovered by locking the
converged vectors and re-running on the deflated operator until no
further eigenvalue enters the top ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ConvergenceError, DegenerateError
from .graph import Graph

__all__ = [
    "MAX_PAIRS",
    "SpectralSummary",
    "top_eigenpairs",
    "full_spectrum",
    "component_entry",
    "pearson_cn_vs_component",
    "spectrum_table",
]

MAX_PAIRS = 32
_TIE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Top eigenpairs; ``eigenvectors[d]`` is the unit vector of ``eigenvalues[d]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    matvecs: int = 0

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[1]

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def delta(self) -> float:
        """Eigengap ratio ``lambda_2^2 / lambda_1^2``."""
        if self.k < 2:
            raise ValueError("eigengap needs at least two eigenpairs")
        l1 = self.eigenvalues[0] ** 2
        if l1 == 0.0:
            return math.nan
        return float(self.eigenvalues[1] ** 2 / l1)

    def embedding(self, x: int) -> np.ndarray:
        """Coordinates ``lambda_d * v_d[x]`` of node ``x`` over the retained pairs."""
        return self.eigenvalues * self.eigenvectors[:, x]


def _order(vals: np.ndarray) -> np.ndarray:
    """Indices sorting by squared value, positive first among ties."""
    idx = np.argsort(-np.abs(vals), kind="stable")
    mags = np.abs(vals[idx])
    scale = max(1.0, float(mags[0])) if len(mags) else 1.0
    out = []
    i = 0
    while i < len(idx):
        j = i + 1
        while j < len(idx) and mags[j - 1] - mags[j] <= _TIE_RTOL * scale:
            j += 1
        group = idx[i:j]
        out.extend(group[np.argsort(-vals[group], kind="stable")])
        i = j
    return np.asarray(out, dtype=np.int64)


def _normalize_sign(v: np.ndarray) -> np.ndarray:
    s = v.sum()
    if abs(s) > 1e-10:
        return v if s > 0 else -v
    nz = np.flatnonzero(np.abs(v) > 1e-8)
    if len(nz) and v[nz[0]] < 0:
        return -v
    return v


def _project_out(w: np.ndarray, basis: np.ndarray | None) -> np.ndarray:
    if basis is None or len(basis) == 0:
        return w
    return w - basis.T @ (basis @ w)


def _random_start(rng: np.random.Generator, n: int, *bases) -> np.ndarray:
    for _ in range(10):
        q = rng.standard_normal(n)
        for _ in range(2):
            for b in bases:
                q = _project_out(q, b)
        nrm = np.linalg.norm(q)
        if nrm > 1e-8:
            return q / nrm
    raise ConvergenceError("could not draw a start vector outside the known subspace", math.inf)


def _lanczos(A, n: int, want: int, rng: np.random.Generator, locked: np.ndarray | None,
             tol: float, max_matvecs: int, check_every: int | None = None):
    """One Lanczos run on ``A`` restricted to the complement of ``locked``.

    Returns ``(values, vectors, estimates, matvecs, converged)`` for the
    ``want`` Ritz pairs of largest magnitude (vectors as rows).
    """
    p = 0 if locked is None else len(locked)
    room = n - p
    want = min(want, room)
    if want <= 0:
        return np.empty(0), np.empty((0, n)), np.empty(0), 0, True
    cap = min(room, max_matvecs)
    Q = np.empty((cap, n))
    alphas = np.empty(cap)
    betas = np.empty(cap)
    q = _random_start(rng, n, locked)
    beta_prev = 0.0
    mv = 0
    last = None
    for j in range(cap):
        Q[j] = q
        w = A @ q
        mv += 1
        w = _project_out(w, locked)
        alpha = float(q @ w)
        w -= alpha * q
        if j > 0:
            w -= beta_prev * Q[j - 1]
        for _ in range(2):
            w = _project_out(w, Q[:j + 1])
            w = _project_out(w, locked)
        beta = float(np.linalg.norm(w))
        alphas[j] = alpha
        dim = j + 1
        exhausted = dim == room
        step = check_every or max(1, dim // 8)
        if dim >= want and (exhausted or dim == cap or dim % step == 0 or dim == want):
            theta, S = linalg.eigh_tridiagonal(alphas[:dim], betas[:dim - 1]) if dim > 1 else (
                alphas[:1].copy(), np.ones((1, 1)))
            sel = _order(theta)[:want]
            scale = max(1.0, float(np.abs(theta).max()))
            est = beta * np.abs(S[-1, sel])
            last = (theta, S, sel, est, dim)
            if exhausted or np.all(est <= tol * scale):
                vecs = S[:, sel].T @ Q[:dim]
                return theta[sel], vecs, est, mv, True
        if dim == cap:
            break
        scale = max(1.0, abs(alpha))
        if beta <= 1e-11 * scale:
            # invariant subspace reached; continue in a fresh direction
            q = _random_start(rng, n, locked, Q[:dim])
            betas[j] = 0.0
        else:
            q = w / beta
            betas[j] = beta
        beta_prev = betas[j]
    if last is None:
        return np.empty(0), np.empty((0, n)), np.array([math.inf]), mv, False
    theta, S, sel, est, dim = last
    vecs = S[:, sel].T @ Q[:dim]
    return theta[sel], vecs, est, mv, False


def _residuals(A, vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    if len(vals) == 0:
        return np.empty(0)
    R = (A @ vecs.T) - vecs.T * vals
    return np.linalg.norm(R, axis=0)


def top_eigenpairs(g: Graph, k: int = 2, tol: float = 1e-10, seed: int = 0) -> SpectralSummary:
    """The ``k`` adjacency eigenpairs of largest ``|lambda|``, ordered by
    ``lambda^2`` (positive first among ties), with unit eigenvectors.

    Raises ``ConvergenceError`` when a run exhausts ``10 * N`` matrix-vector
    products twice in a row.
    """
    n = g.n
    if n < 2:
        raise ValueError("need at least two nodes")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of nodes {n}")
    if k > MAX_PAIRS:
        raise ValueError(f"k={k} exceeds the limit of {MAX_PAIRS} eigenpairs")
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = g.adjacency
    rng = np.random.default_rng(seed)
    budget = 10 * n
    total_mv = 0

    def run(locked, want):
        nonlocal total_mv
        best = math.inf
        for _ in range(2):
            vals, vecs, est, mv, ok = _lanczos(A, n, want, rng, locked, tol, budget)
            total_mv += mv
            if ok and len(vals):
                scale = max(1.0, float(np.abs(vals).max()))
                res = _residuals(A, vals, vecs)
                if np.all(res <= tol * scale):
                    return vals, vecs
                best = min(best, float(res.max()))
            elif ok:
                return vals, vecs
            else:
                best = min(best, float(np.max(est)) if len(est) else math.inf)
        raise ConvergenceError("Lanczos did not converge", best)

    vals, vecs = run(None, k)
    while len(vecs) < n:
        order = _order(vals)[:k]
        top = vals[order]
        scale = max(1.0, float(np.abs(top).max()))
        kth = abs(float(top[-1])) if len(top) >= k else -math.inf
        extra_vals, extra_vecs = run(vecs, k)
        if len(extra_vals) == 0:
            break
        mag = np.abs(extra_vals)
        keep = mag > kth + _TIE_RTOL * scale
        if top[-1] < 0:
            # a positive copy at the boundary outranks a negative one
            keep |= (mag >= kth - _TIE_RTOL * scale) & (extra_vals > 0)
        if not np.any(keep):
            break
        vals = np.concatenate([vals, extra_vals[keep]])
        vecs = np.vstack([vecs, extra_vecs[keep]])

    order = _order(vals)[:k]
    vals = vals[order]
    vecs = np.array([_normalize_sign(v / np.linalg.norm(v)) for v in vecs[order]])
    return SpectralSummary(
        eigenvalues=vals,
        eigenvectors=vecs,
        residuals=_residuals(A, vals, vecs),
        matvecs=total_mv,
    )


def full_spectrum(g: Graph, seed: int = 0) -> SpectralSummary:
    """All ``N`` eigenpairs by running Lanczos to exhaustion (small graphs only)."""
    n = g.n
    if n > 2000:
        raise ValueError("full spectrum is limited to N <= 2000")
    rng = np.random.default_rng(seed)
    vals, vecs, _, mv, _ = _lanczos(g.adjacency, n, n, rng, None, 1e-12, n, check_every=n)
    order = _order(vals)
    vals = vals[order]
    vecs = vecs[order]
    # re-orthonormalize inside clusters of equal eigenvalues
    q, _ = np.linalg.qr(vecs.T)
    vecs = q.T * np.sign(np.sum(q.T * vecs, axis=1))[:, None]
    vecs = np.array([_normalize_sign(v) for v in vecs])
    return SpectralSummary(vals, vecs, _residuals(g.adjacency, vals, vecs), mv)


def component_entry(s: SpectralSummary, d: int, x: int, y: int) -> float:
    """Entry ``(x, y)`` of the rank-one projector ``v_d v_d^T`` (``d`` is 1-based)."""
    if not 1 <= d <= s.k:
        raise IndexError(f"component {d} outside 1..{s.k}")
    v = s.eigenvectors[d - 1]
    return float(v[x] * v[y])


def _pearson_sums(g: Graph, s: SpectralSummary, ds: list[int], block: int = 512):
    n = g.n
    A = g.adjacency
    k = g.degrees.astype(np.float64)
    npairs = n * (n - 1) / 2
    mean_cn = float((k * (k - 1) / 2).sum()) / npairs
    V = s.eigenvectors[[d - 1 for d in ds]]
    lam2 = s.eigenvalues[[d - 1 for d in ds]] ** 2
    mean_c = lam2 * ((V.sum(axis=1) ** 2 - (V * V).sum(axis=1)) / 2) / npairs
    sxx = 0.0
    syy = np.zeros(len(ds))
    sxy = np.zeros(len(ds))
    for start in range(0, n, block):
        rows = np.arange(start, min(start + block, n))
        cn = (A[rows] @ A).toarray()
        mask = np.arange(n)[None, :] > rows[:, None]
        xc = cn[mask] - mean_cn
        sxx += float(xc @ xc)
        for i in range(len(ds)):
            comp = lam2[i] * np.outer(V[i, rows], V[i])[mask] - mean_c[i]
            syy[i] += float(comp @ comp)
            sxy[i] += float(xc @ comp)
    return npairs, mean_cn, mean_c, sxx, syy, sxy


def _degenerate(ss: float, npairs: float, mean: float) -> bool:
    return ss <= npairs * (1e-12 * max(1.0, abs(mean))) ** 2


def pearson_cn_vs_component(g: Graph, s: SpectralSummary, d: int) -> float:
    """Pearson r between common-neighbour counts and ``lambda_d^2 v_d v_d^T``
    over the off-diagonal upper triangle."""
    if g.n < 3:
        raise ValueError("need at least three nodes")
    if not 1 <= d <= s.k:
        raise IndexError(f"component {d} outside 1..{s.k}")
    npairs, mcn, mc, sxx, syy, sxy = _pearson_sums(g, s, [d])
    if _degenerate(sxx, npairs, mcn) or _degenerate(syy[0], npairs, mc[0]):
        raise DegenerateError("degenerate correlation: zero variance")
    return float(sxy[0] / math.sqrt(sxx * syy[0]))


def spectrum_table(g: Graph, s: SpectralSummary) -> list[dict]:
    """Rows ``(d, lambda, lambda^2, r)``; ``r`` is ``nan`` and ``degenerate``
    is set when the correlation is undefined."""
    ds = list(range(1, s.k + 1))
    rows = []
    if g.n >= 3:
        npairs, mcn, mc, sxx, syy, sxy = _pearson_sums(g, s, ds)
    for i, d in enumerate(ds):
        lam = float(s.eigenvalues[i])
        r = math.nan
        degenerate = True
        if g.n >= 3 and not (_degenerate(sxx, npairs, mcn) or _degenerate(syy[i], npairs, mc[i])):
            r = float(sxy[i] / math.sqrt(sxx * syy[i]))
            degenerate = False
        rows.append({"d": d, "lambda": lam, "lambda_sq": lam * lam, "r": r,
                     "degenerate": degenerate})
    return rows
