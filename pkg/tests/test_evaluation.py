import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigenlink.errors import DataError
from eigenlink.evaluation import (
    RankAccumulator,
    auc_exact,
    auc_sampled,
    aupr,
    mann_whitney_u,
    n_test_links,
    split_edges,
    winning_rate,
)
from eigenlink.graph import erdos_renyi
from eigenlink.similarity import ScoreTable, iter_candidate_blocks, make_scorer, score

from .conftest import random_connected
from .oracles import auc_bruteforce, aupr_curve_walk
from .reference_tables import INDICES, PUBLISHED_R, auc_matrix


def candidates(train):
    iu = np.column_stack(np.triu_indices(train.n, 1))
    keep = np.array([not train.has_edge(x, y) for x, y in iu])
    return iu[keep]


def instance(n, m, seed, frac=0.1, index="CN"):
    g = erdos_renyi(n, m, seed) if m else random_connected(n, n, seed)
    sp = split_edges(g, frac, seed)
    tr = sp.train_graph(g)
    table = score(tr, index, candidates(tr))
    return g, sp, tr, table


def test_split_size_rounding():
    assert n_test_links(118, 0.1) == 12
    assert n_test_links(5, 0.5) == 3
    assert n_test_links(15, 0.1) == 2
    with pytest.raises(ValueError):
        split_edges(random_connected(10, 5, 0), 1.0, 0)


@given(st.integers(0, 10_000), st.sampled_from([0.1, 0.25, 0.5, 0.9]))
@settings(max_examples=30, deadline=None)
def test_split_partitions(seed, frac):
    g = random_connected(30, 30, seed)
    sp = split_edges(g, frac, seed)
    tr, te = set(map(tuple, sp.train.tolist())), set(map(tuple, sp.test.tolist()))
    assert not tr & te
    assert tr | te == set(map(tuple, g.edges.tolist()))
    assert len(te) == n_test_links(g.m, frac)


def test_split_deterministic():
    g = random_connected(40, 60, 1)
    a, b = split_edges(g, 0.1, 7), split_edges(g, 0.1, 7)
    assert np.array_equal(a.test, b.test)
    assert not np.array_equal(a.test, split_edges(g, 0.1, 8).test)


def test_auc_perfect_and_ties():
    pairs = np.array([[0, 1], [0, 2], [1, 2], [1, 3]])
    perfect = ScoreTable(None, pairs, np.array([4.0, 3, 2, 1]))
    assert auc_exact(perfect, [(0, 1), (0, 2)]) == 1.0
    assert auc_sampled(perfect, [(0, 1), (0, 2)], n=1000) == 1.0
    flat = ScoreTable(None, pairs, np.ones(4))
    assert auc_exact(flat, [(0, 1)]) == 0.5
    assert auc_sampled(flat, [(0, 1)], n=1000) == 0.5


def test_auc_errors():
    pairs = np.array([[0, 1], [0, 2]])
    t = ScoreTable(None, pairs, np.array([1.0, 2.0]))
    with pytest.raises(DataError):
        auc_exact(t, [])
    with pytest.raises(DataError):
        auc_exact(t, [(0, 1), (0, 2)])


@pytest.mark.parametrize("seed", range(5))
def test_auc_matches_bruteforce(seed):
    _, sp, _, table = instance(12, 0, seed, frac=0.2)
    test = set(map(tuple, sp.test.tolist()))
    pos = [s for p, s in zip(table.pairs.tolist(), table.scores) if tuple(p) in test]
    neg = [s for p, s in zip(table.pairs.tolist(), table.scores) if tuple(p) not in test]
    assert auc_exact(table, sp.test) == pytest.approx(auc_bruteforce(pos, neg), abs=1e-12)


def test_aupr_simple():
    pairs = np.array([[0, 1], [0, 2], [0, 3], [1, 2]])
    t = ScoreTable(None, pairs, np.array([4.0, 3, 2, 1]))
    assert aupr(t, [(0, 1), (0, 2)]) == 1.0
    assert aupr(t, [(0, 2)]) == 0.5


@pytest.mark.parametrize("seed", range(5))
def test_aupr_matches_curve_walk(seed):
    _, sp, _, table = instance(12, 0, seed, frac=0.2)
    ref = aupr_curve_walk(list(map(tuple, table.pairs.tolist())), table.scores.tolist(),
                          map(tuple, sp.test.tolist()))
    assert aupr(table, sp.test) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("index", ["CN", "RA", "CLE", "LP:epsilon=0.01"])
def test_streaming_matches_table(index):
    g = erdos_renyi(80, 300, 2)
    sp = split_edges(g, 0.1, 2)
    tr = sp.train_graph(g)
    scorer = make_scorer(tr, index)
    table = score(tr, index, candidates(tr))
    acc = RankAccumulator(sp.test_keys, scorer.score_pairs(
        np.column_stack([sp.test_keys // g.n, sp.test_keys % g.n])))
    for keys, vals in iter_candidate_blocks(scorer, tr, block_entries=500):
        acc.add(keys, vals)
    assert acc.auc() == pytest.approx(auc_exact(table, sp.test), abs=1e-12)
    assert acc.aupr() == pytest.approx(aupr(table, sp.test), abs=1e-12)


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_invariant_under_monotone_transform_and_shuffle(seed):
    _, sp, _, table = instance(25, 0, seed, frac=0.2, index="RA")
    a0, p0 = auc_exact(table, sp.test), aupr(table, sp.test)
    mono = ScoreTable(None, table.pairs, np.exp(3 * table.scores) + 1)
    assert auc_exact(mono, sp.test) == pytest.approx(a0, abs=1e-12)
    assert aupr(mono, sp.test) == pytest.approx(p0, abs=1e-12)
    perm = np.random.default_rng(seed).permutation(len(table))
    shuf = ScoreTable(None, table.pairs[perm], table.scores[perm])
    assert auc_exact(shuf, sp.test) == pytest.approx(a0, abs=1e-12)
    assert aupr(shuf, sp.test) == p0
    assert 0 <= p0 <= 1


def test_random_scores_auc_half():
    _, sp, tr, table = instance(200, 1000, 0)
    vals = [auc_exact(ScoreTable(None, table.pairs, np.random.default_rng(s).random(len(table))), sp.test)
            for s in range(100)]
    assert abs(np.mean(vals) - 0.5) <= 0.02


def test_sampled_close_to_exact():
    _, sp, _, table = instance(200, 1000, 1)
    exact = auc_exact(table, sp.test)
    assert abs(auc_sampled(table, sp.test, 100_000, seed=0) - exact) < 0.01
    mad = np.mean([abs(auc_sampled(table, sp.test, 100_000, seed=s) - exact) for s in range(20)])
    assert mad < 0.005


def test_random_aupr_near_prevalence():
    _, sp, _, table = instance(100, 500, 0)
    prevalence = len(sp.test) / len(table)
    vals = [aupr(ScoreTable(None, table.pairs, np.random.default_rng(s).random(len(table))), sp.test)
            for s in range(50)]
    assert abs(np.mean(vals) / prevalence - 1) <= 0.2


def test_winning_rate_basic():
    r = winning_rate({"a": {"n1": 0.9, "n2": 0.8}, "b": {"n1": 0.5, "n2": 0.7}})
    assert r == {"a": 1.0, "b": 0.0}
    r = winning_rate({"a": {"n1": 0.9, "n2": 0.8}, "b": {"n1": 0.9, "n2": 0.7}})
    assert r == {"a": 0.75, "b": 0.25}
    assert sum(r.values()) == 1.0
    with pytest.raises(DataError):
        winning_rate({"a": {"n1": 0.9}, "b": {"n2": 0.7}})


def test_winning_rate_published_matrix():
    r = winning_rate(auc_matrix())
    assert round(r["CLE"] * 100, 2) == 77.78
    for idx in INDICES:
        assert round(r[idx], 4) == pytest.approx(PUBLISHED_R[idx], abs=1e-4)


def test_mann_whitney_examples():
    u, p = mann_whitney_u([1, 2, 3], [1, 2, 3])
    assert u == 4.5 and p == 1.0
    u, _ = mann_whitney_u([1, 2, 3], [10, 20, 30])
    assert u == 0
    u, _ = mann_whitney_u([10, 20, 30], [1, 2, 3])
    assert u == 9
    assert mann_whitney_u([5, 5], [5, 5, 5]) == (3.0, 1.0)


def permutation_p(a, b, n_perm, rng):
    """Two-sided permutation p-value of U via random relabelling."""
    pooled = np.concatenate([a, b])
    na = len(a)
    mean = na * len(b) / 2

    def u_stat(x, y):
        return (x[:, None] > y[None, :]).sum() + 0.5 * (x[:, None] == y[None, :]).sum()

    obs = abs(u_stat(a, b) - mean)
    hits = 0
    for _ in range(n_perm):
        perm = rng.permutation(pooled)
        if abs(u_stat(perm[:na], perm[na:]) - mean) >= obs - 1e-12:
            hits += 1
    return hits / n_perm


@pytest.mark.parametrize("seed", range(4))
def test_mann_whitney_vs_permutation(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 1.0, 18)
    b = rng.normal(0.4 * seed, 1.0, 18)
    _, p = mann_whitney_u(a, b)
    assert p == pytest.approx(permutation_p(a, b, 20_000, rng), abs=0.02)
