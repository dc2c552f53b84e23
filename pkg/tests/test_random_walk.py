import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from config import Config
from growth_ops import grow
from models.tree_models import BadParam, BadVertexId, Family, IsolatedVertex, ModelSpec, WalkConfig
from random_walk import exact_mfpt, fpt_dense, fpt_exact, mc_mfpt, mfpt, walk_step
from tree_core import from_networkx, path_tree, star_tree, wiener_oracle


def test_fpt_on_path_towards_an_end():
    assert fpt_exact(path_tree(3), 0) == [0, 3, 4]
    assert fpt_dense(path_tree(3), 0) == [0, 3, 4]


@pytest.mark.parametrize("order", [4, 5, 6])
def test_dense_solve_agrees_with_subtree_sweep(order):
    for graph in nx.nonisomorphic_trees(order):
        tree = from_networkx(graph)
        for target in range(tree.n):
            assert fpt_dense(tree, target) == fpt_exact(tree, target)


def test_dense_solve_is_capped(monkeypatch):
    monkeypatch.setattr(Config, "DENSE_SOLVE_MAX_VERTICES", 3)
    with pytest.raises(BadParam):
        fpt_dense(path_tree(4), 0)


def test_fpt_rejects_bad_target():
    with pytest.raises(BadVertexId):
        fpt_dense(path_tree(3), 7)


@pytest.mark.parametrize("tree, expected", [
    (path_tree(3), Fraction(8, 3)),
    (star_tree(3), Fraction(9, 2)),
])
def test_exact_mfpt_small_trees(tree, expected):
    assert exact_mfpt(tree) == expected


def test_exact_mfpt_of_tgraph_two():
    tree = grow(ModelSpec(family=Family.TGRAPH, t=2))
    assert exact_mfpt(tree) == Fraction(117, 5)


@pytest.mark.parametrize("order", range(2, 13))
def test_first_passage_sum_is_twice_wiener_per_ordered_pair(order):
    for graph in nx.nonisomorphic_trees(order):
        tree = from_networkx(graph)
        total = sum(sum(fpt_exact(tree, v)) for v in range(tree.n))
        assert total == 2 * (tree.n - 1) * wiener_oracle(tree)
        assert exact_mfpt(tree) == Fraction(2 * wiener_oracle(tree), tree.n)


def test_mfpt_report_lemma_factor_is_two():
    report = mfpt(path_tree(4))
    assert report.exact == report.from_wiener_2S_over_V == Fraction(5)
    assert report.printed_S_over_V == Fraction(5, 2)
    assert report.lemma_factor == 2
    assert report.mc is None


def test_walks_need_two_vertices():
    with pytest.raises(IsolatedVertex):
        exact_mfpt(path_tree(1))
    with pytest.raises(IsolatedVertex):
        walk_step(path_tree(1), 0, np.random.default_rng(0))


def test_walk_step_moves_to_a_neighbour():
    rng = np.random.default_rng(1)
    tree = star_tree(4)
    for _ in range(20):
        assert walk_step(tree, 0, rng) in (1, 2, 3, 4)
    assert walk_step(tree, 3, rng) == 0


@pytest.mark.parametrize("tree, exact", [
    (path_tree(3), 8 / 3),
    (grow(ModelSpec(family=Family.TGRAPH, t=2)), 117 / 5),
])
def test_mc_estimate_within_three_standard_errors(tree, exact):
    est = mc_mfpt(tree, WalkConfig(rng_seed=1, trials=100_000))
    assert est.trials == 100_000
    assert est.truncated == 0
    assert abs(est.estimate - exact) < 3 * est.stderr


def test_mc_same_seed_reproduces_estimate():
    tree = grow(ModelSpec(family=Family.TGRAPH, t=2))
    first = mc_mfpt(tree, WalkConfig(rng_seed=11, trials=5000))
    again = mc_mfpt(tree, WalkConfig(rng_seed=11, trials=5000))
    other = mc_mfpt(tree, WalkConfig(rng_seed=12, trials=5000))
    assert first == again
    assert first.estimate != other.estimate


def test_mc_is_independent_of_thread_count():
    single = mc_mfpt(star_tree(5), WalkConfig(rng_seed=3, trials=3000, threads=1))
    pooled = mc_mfpt(star_tree(5), WalkConfig(rng_seed=3, trials=3000, threads=2))
    assert single == pooled


def test_mc_truncation_is_reported():
    est = mc_mfpt(path_tree(6), WalkConfig(rng_seed=0, trials=200, max_steps=1))
    assert est.truncated > 0
    assert est.trials + est.truncated == 200
    assert all(not math.isnan(x) for x in (est.estimate, est.stderr))
