"""Acceptance gate: one printed PASS/FAIL/SKIP line per criterion.

Tolerances are pinned as module constants. Dataset-backed checks run only
when ``EIGENLINK_MANIFEST`` names a manifest that provides the network.
"""

import io
import math
import time

import numpy as np
import pytest

from eigenlink import cli
from eigenlink.evaluation import auc_exact, auc_sampled, aupr, split_edges, winning_rate
from eigenlink.config import parse_grid
from eigenlink.experiments import evaluate, loglog_slope, sweep, time_scoring
from eigenlink.graph import erdos_renyi, network_stats, rewire_degree_preserving
from eigenlink.registry import dataset_available, default_manifest, load_dataset
from eigenlink.similarity import (
    IndexConfig,
    IndexId,
    ScoreTable,
    cle_scores,
    cle_star_scores,
    lp_scores,
    scf_enhance,
    score,
    score_local,
    tilde_scores,
    tilde_star_scores,
)
from eigenlink.spectral import full_spectrum, spectrum_table, top_eigenpairs

from .conftest import ACCEPTANCE_LINES, random_connected
from .oracles import aupr_curve_walk, dense_adj, tilde_eq5
from .reference_tables import (
    FTB_CLE_AUC,
    FTB_CLE_AUPR,
    HG_REWIRED_CLUSTERING,
    auc_matrix,
    published_stats,
)
from .test_similarity import ALL_CONFIGS, dense_reference

IDENTITY_TOL = 1e-10
ORACLE_TOL = 1e-7
RECON_TOL = 1e-7
TRACE_RTOL = 1e-6
TILDE_TOL = 1e-7
AUC_RANDOM_TOL = 0.02
AUC_SAMPLED_TOL = 0.01
AUPR_MAX_CANDIDATES = 500
WINNING_RATE_CLE = "77.78%"
STAT_TOL = {"rho": 0.005, "k": 0.005, "c": 0.005, "sigma": 0.005, "l": 0.05, "delta": 0.001}
FTB_TOL = 0.03
HG_NULL_TOL = 0.02
SCALING_SIZES = [500, 1000, 2000, 4000]
CN_TIMEOUT = 60.0
SWEEP_TOL = 0.005
DNC_SWEEP_RUNS = 20


def record(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def skip(name, reason):
    line = f"[SKIP] {name}: {reason}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    pytest.skip(reason)


def max_diff(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if len(a) else 0.0


def test_algebraic_identities():
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 101))
        g = random_connected(n, int(rng.integers(0, 2 * n)), seed)
        s = top_eigenpairs(g, 2, seed=seed)
        cn = score_local(g, "CN").scores
        worst = max(
            worst,
            max_diff(cle_star_scores(g, s, s.delta).scores, cle_scores(g, s).scores),
            max_diff(cle_star_scores(g, s, 1.0).scores, scf_enhance(g, "CN").scores),
            max_diff(tilde_star_scores(g, s, 1.0).scores, cn),
            max_diff(lp_scores(g, 0.0).scores, cn),
        )
    record("algebraic identities, 50 graphs N<=100", worst <= IDENTITY_TOL,
           f"max |diff| = {worst:.2e} (tol {IDENTITY_TOL:g})")


def test_dense_oracle_all_indices():
    worst, covered = 0.0, set()
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(5, 41))
        g = random_connected(n, int(rng.integers(0, 2 * n)), 100 + seed)
        s = top_eigenpairs(g, 2)
        for cfg in ALL_CONFIGS + [IndexConfig(IndexId.KATZ, beta=0.5 / s.lambda1)]:
            t = score(g, cfg, spectrum=s)
            ref = dense_reference(g, cfg)
            worst = max(worst, max_diff(t.scores, ref[t.pairs[:, 0], t.pairs[:, 1]]))
            covered.add(cfg.index_id)
    ok = worst <= ORACLE_TOL and covered == set(IndexId)
    record("dense-oracle equivalence, 16 indices x 20 graphs N<=40", ok,
           f"max |diff| = {worst:.2e} (tol {ORACLE_TOL:g})")


def _spectral_instances():
    for seed in range(10):
        n = 10 + 5 * seed
        yield random_connected(n, 2 * n, 200 + seed)


def test_spectral_reconstruction():
    worst, worst_trace = 0.0, 0.0
    for g in _spectral_instances():
        f = full_spectrum(g)
        A = dense_adj(g)
        rec = (f.eigenvectors.T * f.eigenvalues ** 2) @ f.eigenvectors
        worst = max(worst, float(np.max(np.abs(rec - A @ A))))
        worst_trace = max(worst_trace, abs((f.eigenvalues ** 2).sum() - 2 * g.m) / (2 * g.m))
    ok = worst <= RECON_TOL and worst_trace <= TRACE_RTOL
    record("spectral reconstruction of CN, N<=60", ok,
           f"max |diff| = {worst:.2e}, sum lambda^2 rel err = {worst_trace:.2e}")


def test_tilde_identity():
    worst = 0.0
    for g in _spectral_instances():
        s = top_eigenpairs(g, 2)
        t = tilde_scores(g, s)
        ref = tilde_eq5(dense_adj(g))
        worst = max(worst, max_diff(t.scores, ref[t.pairs[:, 0], t.pairs[:, 1]]))
    record("rank-one shortcut equals truncated spectral sum", worst <= TILDE_TOL,
           f"max |diff| = {worst:.2e} (tol {TILDE_TOL:g})")


def _instance(n, m, seed):
    g = erdos_renyi(n, m, seed)
    sp = split_edges(g, 0.1, seed)
    tr = sp.train_graph(g)
    iu = np.column_stack(np.triu_indices(n, 1))
    cand = iu[~np.isin(iu[:, 0] * n + iu[:, 1], tr.edge_keys)]
    return g, sp, tr, cand


def test_auc_calibration():
    g, sp, tr, cand = _instance(200, 1000, 0)
    rand = [auc_exact(ScoreTable(None, cand, np.random.default_rng(s).random(len(cand))), sp.test)
            for s in range(100)]
    mean_rand = float(np.mean(rand))
    pos = np.isin(cand[:, 0] * g.n + cand[:, 1], sp.test_keys)
    perfect = ScoreTable(None, cand, pos.astype(float))
    table = score(tr, "CN", cand)
    exact = auc_exact(table, sp.test)
    sampled = auc_sampled(table, sp.test, n=100_000, seed=0)
    ok = (abs(mean_rand - 0.5) <= AUC_RANDOM_TOL and auc_exact(perfect, sp.test) == 1.0
          and auc_sampled(perfect, sp.test, 1000) == 1.0 and abs(sampled - exact) <= AUC_SAMPLED_TOL)
    record("AUC calibration", ok,
           f"random mean {mean_rand:.4f}, perfect 1.0, sampled-exact {abs(sampled - exact):.4f}")


def test_aupr_oracle():
    worst, sizes = 0.0, []
    for seed in range(10):
        g, sp, tr, cand = _instance(32, 60 + 4 * seed, seed)
        assert len(cand) <= AUPR_MAX_CANDIDATES
        sizes.append(len(cand))
        for index in ("CN", "RA", "CLE"):
            t = score(tr, index, cand)
            ref = aupr_curve_walk(list(map(tuple, t.pairs.tolist())), t.scores.tolist(),
                                  map(tuple, sp.test.tolist()))
            worst = max(worst, abs(aupr(t, sp.test) - ref))
    record("AUPR equals precision-recall curve walk", worst <= 1e-12,
           f"max |diff| = {worst:.1e} over {len(sizes)} instances, <= {max(sizes)} candidates")


def test_winning_rate_published():
    r = winning_rate(auc_matrix())
    got = f"{100 * r['CLE']:.2f}%"
    record("winning rate from published AUC matrix", got == WINNING_RATE_CLE, f"R(CLE) = {got}")


def _require(name, criterion):
    if default_manifest() is None:
        skip(criterion, "EIGENLINK_MANIFEST not set")
    if not dataset_available(name):
        skip(criterion, f"{name} not provided by the manifest")
    return load_dataset(name)


@pytest.mark.parametrize("name", sorted(published_stats()))
def test_dataset_statistics(name):
    g = _require(name, f"network statistics {name}")
    ref = published_stats()[name]
    st = network_stats(g)
    got = dict(st.as_row())
    got["delta"] = top_eigenpairs(g, 2).delta
    bad = [k for k, tol in STAT_TOL.items() if not abs(got[k] - ref[k]) <= tol]
    ok = (g.n, g.m) == (ref["N"], ref["M"]) and not bad
    detail = ", ".join(f"{k}={got[k]:.3f}/{ref[k]}" for k in STAT_TOL)
    record(f"network statistics {name}", ok, detail)


@pytest.mark.slow
def test_ftb_cle_reproduction():
    g = _require("FTB", "FTB CLE mean AUC / AUPR")
    rep = evaluate({"FTB": g}, [IndexConfig(IndexId.CLE)], list(range(100)), 0.1)[0]
    ok = abs(rep.mean_auc - FTB_CLE_AUC) <= FTB_TOL and abs(rep.mean_aupr - FTB_CLE_AUPR) <= FTB_TOL
    record("FTB CLE mean AUC / AUPR", ok, f"AUC {rep.mean_auc:.4f}, AUPR {rep.mean_aupr:.4f}")


def test_hg_null_model_clustering():
    g = _require("HG", "HG rewired clustering")
    cs = [network_stats(rewire_degree_preserving(g, seed=s)).avg_clustering for s in range(5)]
    ok = all(abs(c - HG_REWIRED_CLUSTERING) <= HG_NULL_TOL for c in cs)
    record("HG rewired clustering", ok, ", ".join(f"{c:.3f}" for c in cs))


@pytest.mark.slow
def test_dnc_sweep_optimum_near_cle():
    g = _require("DNC", "DNC CLE* sweep optimum near CLE")
    reps, curve, _ = sweep({"DNC": g}, IndexConfig(IndexId.CLE_STAR, alpha=0.0), parse_grid("0:1:0.05"),
                           list(range(DNC_SWEEP_RUNS)), references=[IndexConfig(IndexId.CLE)])
    best = max(c["mean_auc"] for c in curve if not c["reference"])
    cle = next(c["mean_auc"] for c in curve if c["reference"])
    record("DNC CLE* sweep optimum near CLE", best - cle <= SWEEP_TOL,
           f"best {best:.4f}, CLE {cle:.4f}")


def test_dnc_leading_component_dominates():
    g = _require("DNC", "DNC leading-component correlation")
    rows = spectrum_table(g, top_eigenpairs(g, 10))
    rs = [r["r"] for r in rows]
    record("DNC leading-component correlation", rs[0] == max(rs), ", ".join(f"{r:.3f}" for r in rs))


def test_scaling_slopes():
    labels = ["CLE", "KATZ:beta=0.01", "LO:alpha=0.1"]
    slopes = {}
    for lab in labels:
        cfg = IndexConfig.parse(lab)
        secs = [time_scoring(erdos_renyi(n, 5 * n, 0), cfg, repeats=2) for n in SCALING_SIZES]
        slopes[lab] = loglog_slope(SCALING_SIZES, secs)
    ok = slopes["CLE"] < slopes["KATZ:beta=0.01"] and slopes["CLE"] < slopes["LO:alpha=0.1"]
    record("log-log time slope CLE below Katz and LO", ok,
           ", ".join(f"{k} {v:.2f}" for k, v in slopes.items()))


def test_cn_completes_quickly():
    g = erdos_renyi(2000, 10_000, 0)
    t0 = time.perf_counter()
    time_scoring(g, IndexConfig(IndexId.CN))
    secs = time.perf_counter() - t0
    record("CN on N=2000, <k>=10 within timeout", secs < CN_TIMEOUT, f"{secs:.2f} s")


def test_eval_determinism(tmp_path, capsys):
    argv = ["eval", "--dataset", "er:60:240:3", "--index", "CLE", "--index", "RA", "--runs", "5",
            "--seed", "11"]
    outs = []
    for name in ("a", "b"):
        assert cli.main(argv + ["--out", str(tmp_path / name)]) == 0
        outs.append((tmp_path / name / "metrics.csv").read_bytes())
    capsys.readouterr()
    record("eval determinism (byte-identical metrics.csv)", outs[0] == outs[1],
           f"{len(outs[0])} bytes")
