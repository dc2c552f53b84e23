from fractions import Fraction

import networkx as nx
import pytest

import closed_forms as cf
from growth_ops import grow, grow_cayley, grow_exponential, star_fractal, subdivide
from models.tree_models import BadParam, Family, FormulaDivergence, FormulaName, ModelSpec, SeedSpec, Tier
from tree_core import from_networkx, path_tree, star_tree, wiener_oracle


def _seeds(max_order):
    for order in range(2, max_order + 1):
        for graph in nx.nonisomorphic_trees(order):
            yield from_networkx(graph)


@pytest.mark.parametrize("a", range(2, 16))
def test_path_forms(a):
    assert cf.path_wiener(a) == cf.path_wiener_double_sum(a) == wiener_oracle(path_tree(a))


def test_path_rejects_single_vertex():
    with pytest.raises(BadParam):
        cf.path_wiener(1)


def test_lemma2_and_its_cases_on_every_small_seed():
    for seed in _seeds(7):
        s, n = wiener_oracle(seed), seed.n
        oracle = wiener_oracle(subdivide(seed, 1))
        assert cf.lemma2(s, n) == oracle
        old, new, crossing = cf.lemma2_cases(s, n)
        assert (old, new, crossing) == (2 * s, 2 * s - n * (n - 1), 4 * s - n * (n - 1))
        assert old + new + crossing == oracle


@pytest.mark.parametrize("m", [1, 2, 3])
def test_theorem1_matches_oracle(m):
    for seed in _seeds(6):
        s, n = wiener_oracle(seed), seed.n
        oracle = wiener_oracle(subdivide(seed, m))
        assert cf.eq15(s, n, m) == oracle
        assert sum(cf.subdivision_cases(s, n, m)) == oracle
        assert cf.step_subdivision(s, n, m) == (oracle, n + m * (n - 1))


def test_theorem1_printed_cases_only_agree_when_n_equals_m():
    s = wiener_oracle(path_tree(3))
    assert sum(cf.subdivision_cases(s, 3, 3, printed=True)) == sum(cf.subdivision_cases(s, 3, 3))
    assert sum(cf.subdivision_cases(s, 3, 1, printed=True)) != sum(cf.subdivision_cases(s, 3, 1))


@pytest.mark.parametrize("m", [1, 2, 4])
def test_lemma3_matches_oracle(m):
    for seed in _seeds(6):
        s, n = wiener_oracle(seed), seed.n
        assert cf.lemma3(s, n, m) == wiener_oracle(star_fractal(seed, 1, m))


def test_theorem2_printed_constant_fails_on_single_edge():
    assert cf.eq22(1, 2, 1, 1) == Fraction(23, 3)
    assert cf.eq22(1, 2, 1, 1, printed=False) == 9
    assert wiener_oracle(star_fractal(path_tree(2), 1, 1)) == 9


def test_theorem2_case_sums():
    assert cf.star_fractal_cases(1, 2, 1, 1) == (2, 0, 0, 2, 4, 0, 1)
    assert cf.star_fractal_cases(1, 2, 2, 1) == (3, 1, 0, 6, 10, 3, 6)


@pytest.mark.parametrize("w", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_theorem2_corrected_matches_oracle(w, m):
    for seed in _seeds(6):
        s, n = wiener_oracle(seed), seed.n
        oracle = wiener_oracle(star_fractal(seed, w, m))
        assert sum(cf.star_fractal_cases(s, n, w, m)) == oracle
        assert cf.eq22(s, n, w, m, printed=False) == oracle
        assert cf.step_star_fractal(s, n, w, m) == (oracle, n + w * (m + 1) * (n - 1))


@pytest.mark.parametrize("w", [1, 2, 3, 4])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_grouped_form_offset(w, m):
    for seed in _seeds(5):
        s, n = wiener_oracle(seed), seed.n
        offset = cf.eq29(s, n, w, m) - cf.eq22(s, n, w, m, printed=False)
        assert offset == Fraction(w * m * (w - 1) * (8 * w + 5) * n, 3)


def test_first_order_corollaries():
    spec = ModelSpec(family=Family.FIRST_ORDER_SUBDIVISION, t=5)
    sequence = cf.canonical_sequence(spec, 1, 2)
    for t, (s, n) in enumerate(sequence):
        assert cf.eq13(1, 2, t) == s
        assert cf.eq14(t) == s == cf.path_wiener(2 ** t + 1)
    assert cf.eq14(2) == 20


def test_subdivision_corollary_variants_coincide_at_m_one():
    assert cf.eq19(4, 3, 1, 2, "2n-1") == cf.eq19(4, 3, 1, 2, "2m-1")
    with pytest.raises(BadParam):
        cf.eq19(4, 3, 1, 2, "2k-1")


def test_star_fractal_corollary4_first_failure():
    assert cf.eq21(1, 2, 1, 0) == 1
    assert cf.eq21(1, 2, 1, 1) == 15
    assert cf.lemma3(1, 2, 1) == 9


def test_star_fractal_corollary5_undefined_at_mw_one():
    assert cf.eq30(1, 2, 1, 1, 2) is None
    assert cf.eq30(1, 2, 2, 1, 0) == 1


@pytest.mark.parametrize("t, expected", [(0, 1), (1, 9), (2, 117), (3, 1809)])
def test_tgraph_closed_form(t, expected):
    assert cf.eq31(t) == expected
    assert cf.tgraph_wiener(t) == expected
    assert wiener_oracle(grow(ModelSpec(family=Family.TGRAPH, t=t))) == expected


def test_iterate_wiener_interleaves_canonical_and_printed():
    results = cf.iterate_wiener(ModelSpec(family=Family.TGRAPH, t=2))
    canonical = [r for r in results if r.formula.tier == Tier.CANONICAL]
    printed = [r for r in results if r.formula.tier == Tier.AS_PRINTED]
    assert [r.value for r in canonical] == [1, 9, 117]
    assert [r.value for r in printed] == [1, 9, 117]
    assert all(r.formula.name == FormulaName.EQ31_TGRAPH for r in results)
    with pytest.raises(BadParam):
        cf.iterate_wiener(ModelSpec(family=Family.EXPONENTIAL, t=1))


def test_iterate_wiener_marks_undefined_printed_values():
    results = cf.iterate_wiener(ModelSpec(family=Family.STAR_FRACTAL, w=1, m=1, t=2))
    printed = [r for r in results if r.formula.name == FormulaName.COR5_STARWM_T and r.formula.tier == Tier.AS_PRINTED]
    assert printed and not any(r.defined for r in printed)


@pytest.mark.parametrize("n, t, expected", [(3, 1, 9), (3, 2, 117), (3, 3, 909), (4, 2, 400)])
def test_cayley_wiener_values(n, t, expected):
    assert cf.cayley_wiener(n, t) == expected
    assert cf.eq45(n, t) == expected
    assert wiener_oracle(grow_cayley(n, t)) == expected


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_cayley_closed_form_matches_oracle(n, t):
    tree = grow_cayley(n, t)
    assert tree.n == cf.cayley_vertices(n, t)
    assert cf.eq45(n, t) == wiener_oracle(tree)
    assert cf.cayley_wiener(n, t) == wiener_oracle(tree)


def test_cayley_wiener_raises_when_closed_form_diverges(monkeypatch):
    monkeypatch.setattr(cf, "eq45", lambda n, t: Fraction(-1))
    with pytest.raises(FormulaDivergence, match="n=3, t=2"):
        cf.cayley_wiener(3, 2)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
@pytest.mark.parametrize("t", [1, 2, 3, 4, 5])
def test_cayley_recursion_agrees_with_closed_forms(n, t):
    recursive = cf.cayley_parts(n, t)
    closed = cf.cayley_parts_closed(n, t)
    assert recursive == closed
    assert recursive.vertices == cf.cayley_vertices(n, t) == n * recursive.ingredient_order - (n - 1)


def test_cayley_rejects_bad_parameters():
    with pytest.raises(BadParam):
        cf.cayley_vertices(2, 3)
    with pytest.raises(BadParam):
        cf.eq45(3, 0)


def test_generalized_cayley_from_star_and_explicit_seed():
    assert cf.cayley_general_wiener(None, 3, 2) == 117
    assert cf.seed_leaf_sums(star_tree(3)) == (3, 6, 3)
    assert cf.cayley_general_wiener(star_tree(3), 3, 1) == 117
    s, s1, s2, leaves, _ = cf.cayley_star_state(3)
    assert cf.eq47(s, s1, s2, leaves, 2, 1) == 93


@pytest.mark.parametrize("t", [0, 1, 2, 3])
def test_generalized_cayley_on_path_seed(t):
    seed = path_tree(2)
    assert cf.cayley_general_wiener(seed, 4, t) == wiener_oracle(grow_cayley(4, t, seed))


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("t", [0, 1, 2, 3])
def test_exponential_forms(m, t):
    seed = from_networkx(nx.star_graph(3))
    s0 = wiener_oracle(seed)
    oracle = wiener_oracle(grow_exponential(seed, m, t))
    assert cf.exponential_wiener(s0, seed.n, m, t) == oracle
    assert cf.eq49(s0, seed.n, m, t) == oracle
    assert cf.eq50(m, t) == cf.exponential_wiener(1, 2, m, t) == wiener_oracle(grow_exponential(path_tree(2), m, t))


def test_exponential_edge_values():
    assert cf.eq50(1, 1) == 10
    assert cf.eq50(1, 2) == 68
    assert cf.eq50(2, 1) == 29
    assert all(cf.eq50(m, 0) == 1 for m in range(1, 6))


@pytest.mark.parametrize(
    "spec",
    [
        ModelSpec(family=Family.TGRAPH, t=3),
        ModelSpec(family=Family.SUBDIVISION, m=2, seed=SeedSpec.parse("0-1,1-2,1-3"), t=2),
        ModelSpec(family=Family.STAR_FRACTAL, w=2, m=2, t=2),
        ModelSpec(family=Family.CAYLEY, n=3, t=3),
        ModelSpec(family=Family.CAYLEY, n=4, seed=SeedSpec.parse("0-1"), t=2),
        ModelSpec(family=Family.EXPONENTIAL, m=2, t=3),
    ],
)
def test_wiener_sequence_matches_grown_trees(spec):
    for step, vertices, s in cf.wiener_sequence(spec):
        tree = grow(spec.with_steps(step))
        assert (tree.n, wiener_oracle(tree)) == (vertices, s), f"{spec.serialize()} step {step}"


def test_registry_has_unique_keys():
    keys = [f.key for f in cf.REGISTRY]
    assert len(keys) == len(set(keys))
    assert {f.name for f in cf.REGISTRY} == set(FormulaName)
