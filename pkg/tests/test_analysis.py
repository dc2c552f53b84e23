import math
from fractions import Fraction

import pytest

from analysis import (
    avg_distance,
    delta_v,
    dim_equality_scan,
    equivalent_m,
    mean_distance_series,
    model_dimensions,
    persistence,
    scaling_fit,
)
from growth_ops import grow
from models.tree_models import (
    BadParam,
    DimensionKind,
    Family,
    InsufficientPoints,
    ModelSpec,
    Persistence,
)
from tree_core import path_tree, star_tree


def test_tgraph_dimensions():
    dims = model_dimensions(ModelSpec(family=Family.TGRAPH))
    assert dims.kind == DimensionKind.FRACTAL
    assert dims.d_f == pytest.approx(math.log(3) / math.log(2))
    assert dims.d_w == pytest.approx(math.log(6) / math.log(2))
    assert dims.d_spectral == pytest.approx(math.log(9) / math.log(6))
    assert persistence(ModelSpec(family=Family.TGRAPH)) == Persistence.PERSISTENT


def test_star_fractal_dimensions():
    assert model_dimensions(ModelSpec(family=Family.STAR_FRACTAL_1M, m=2)).d_f == pytest.approx(2.0)
    dims = model_dimensions(ModelSpec(family=Family.STAR_FRACTAL, w=2, m=3))
    assert dims.d_f == pytest.approx(math.log(2 * 4 + 1) / math.log(3))
    assert dims.d_spectral < 2


@pytest.mark.parametrize("family, kind", [
    (Family.CAYLEY, DimensionKind.INFINITE),
    (Family.EXPONENTIAL, DimensionKind.INFINITE),
    (Family.SUBDIVISION, DimensionKind.NOT_FRACTAL),
])
def test_non_fractal_families(family, kind):
    spec = ModelSpec(family=family, t=1)
    assert model_dimensions(spec).kind == kind
    assert model_dimensions(spec).d_f is None
    assert persistence(spec) == Persistence.NOT_APPLICABLE


def test_delta_v_tgraph_converges_to_two():
    report = delta_v(ModelSpec(family=Family.TGRAPH))
    assert report.empirical_t == 8
    assert report.limit == 2
    assert abs(float(report.empirical) - 2) < 0.01
    assert report.printed == 3
    assert report.agrees_with_printed is False


def test_delta_v_cayley_star_uses_step_two():
    report = delta_v(ModelSpec(family=Family.CAYLEY, n=3, t=1))
    assert report.empirical_t == 2
    assert report.empirical == Fraction(3, 2)
    assert report.limit == 1
    assert report.agrees_with_printed is True


def test_delta_v_exponential():
    report = delta_v(ModelSpec(family=Family.EXPONENTIAL, m=3, t=4))
    assert report.limit == report.empirical == 3


def test_equivalent_m():
    assert equivalent_m(3, 4) == 2
    assert equivalent_m(1, 1) is None
    assert equivalent_m(1, 2) == 2


def test_dim_equality_scan_finds_both_rules():
    solutions = {(s.w, s.n, s.m): s for s in dim_equality_scan(10, 10, 50)}
    assert (3, 4, 2) in solutions
    assert solutions[(3, 4, 2)].rule == "m+2=2^k,w+1=2^j"
    assert solutions[(1, 1, 1)].rule == "w+1=2^j"
    assert solutions[(3, 4, 2)].d_f == pytest.approx(2.0)
    for s in solutions.values():
        lhs = math.log(s.m + 2) / math.log(2)
        rhs = math.log(s.w * (s.n + 1) + 1) / math.log(s.w + 1)
        assert lhs == pytest.approx(rhs)


def test_dim_equality_scan_rejects_bad_bounds():
    with pytest.raises(BadParam):
        dim_equality_scan(0, 5, 5)


def test_tgraph_scaling_exponent():
    fit = scaling_fit(ModelSpec(family=Family.TGRAPH), range(4, 13))
    assert fit.regression == "loglog"
    assert fit.analytic_exponent == pytest.approx(math.log(6) / math.log(3))
    assert fit.exponent == pytest.approx(fit.analytic_exponent, abs=0.02)
    assert fit.printed_exponent == pytest.approx(math.log(6) / math.log(2))
    assert fit.diameter_exponent == pytest.approx(math.log(6) / math.log(2))
    assert fit.r_squared > 0.999
    assert len(fit.points) == 9


def test_subdivision_scaling_exponent_is_two():
    fit = scaling_fit(ModelSpec(family=Family.SUBDIVISION, m=2), range(3, 10))
    assert fit.analytic_exponent == pytest.approx(2.0)
    assert fit.exponent == pytest.approx(2.0, abs=0.02)


def test_exponential_scaling_is_linear_in_t():
    fit = scaling_fit(ModelSpec(family=Family.EXPONENTIAL, m=1), range(4, 11))
    assert fit.regression == "linear_t"
    assert fit.analytic_exponent == pytest.approx(1.0)
    assert fit.exponent == pytest.approx(1.0, abs=0.01)
    for t, ratio in fit.points:
        assert ratio == pytest.approx(t + 2 ** -(t + 1))


def test_cayley_scaling_reports_log_regression():
    fit = scaling_fit(ModelSpec(family=Family.CAYLEY, n=3, t=1), range(1, 9))
    assert fit.regression == "linear_t"
    assert fit.analytic_exponent == 2.0
    assert fit.printed_exponent == pytest.approx(9.0)
    assert fit.diameter_exponent is None


def test_scaling_fit_needs_three_steps():
    with pytest.raises(InsufficientPoints):
        scaling_fit(ModelSpec(family=Family.TGRAPH), [2, 2, 3])
    with pytest.raises(BadParam):
        scaling_fit(ModelSpec(family=Family.CAYLEY, n=3, t=1), [0, 1, 2])


@pytest.mark.parametrize("tree, expected", [
    (path_tree(2), Fraction(1)),
    (star_tree(3), Fraction(3, 2)),
    (grow(ModelSpec(family=Family.CAYLEY, n=3, t=2)), Fraction(13, 5)),
])
def test_avg_distance(tree, expected):
    assert avg_distance(tree) == expected


def test_avg_distance_needs_two_vertices():
    with pytest.raises(BadParam):
        avg_distance(path_tree(1))


def test_cayley_mean_distance_ratio_approaches_limit():
    series = mean_distance_series(ModelSpec(family=Family.CAYLEY, n=3, t=1), [3, 12, 50, 200])
    limit = 2 / math.log(2)
    assert all(p.limit == pytest.approx(limit) for p in series)
    assert series[0].vertices == 22
    gaps = [abs(p.ratio_to_log_v - limit) for p in series]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 0.05 * limit


def test_exponential_mean_distance_limit():
    series = mean_distance_series(ModelSpec(family=Family.EXPONENTIAL, m=1), [20, 200])
    limit = 1 / math.log(2)
    assert series[-1].limit == pytest.approx(limit)
    assert series[-1].ratio_to_log_v == pytest.approx(limit, rel=0.02)


def test_mean_distance_series_rejects_fractal_families():
    with pytest.raises(BadParam):
        mean_distance_series(ModelSpec(family=Family.TGRAPH), [1, 2])
