import math

import mpmath as mp
import numpy as np
import pytest

from hpquad import (
    EPS,
    AdaptiveConfig,
    IntegrationError,
    Refinement,
    build_tables,
    integrate,
    legendre_eval,
    make_segment,
    mapped_points,
    segment_quadrature,
)
from hpquad.adaptive import _exact_dot, _plan_children, accept_test, batch_eval, decide_refinement


@pytest.mark.parametrize(
    "kwargs",
    [
        {"tol": 0.0},
        {"tol": math.inf},
        {"tau": 0.5},  # at or below the indicator floor
        {"tau": 1.0},
        {"p_max": 1},
        {"p_init": 1},
        {"p_init": 16},
        {"magnitude_hint": 0.0},
        {"magnitude_hint": math.nan},
        {"max_passes": 0},
        {"h_min_factor": 0.0},
    ],
)
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        AdaptiveConfig(**kwargs)


def test_config_defaults_are_valid():
    cfg = AdaptiveConfig()
    assert cfg.tol == 0.3e-15
    assert cfg.tau == 0.6
    assert cfg.p_max == 15
    assert cfg.p_init == 5


def test_accept_test_bit_semantics():
    # Differences below half an ulp of the guard vanish; above, they don't.
    assert accept_test(1.0, 1.0, 1.0)
    assert accept_test(1.0, 1.0 + 1e-17, 1.0)
    assert not accept_test(1.0, 1.0 + 1e-15, 1.0)
    assert accept_test(0.5, 0.5 + 1.2e-16, 2.32)
    assert not accept_test(0.5, 0.5 + 3e-16, 2.32)


def test_exact_dot_is_correctly_rounded():
    rng = np.random.default_rng(42)
    with mp.workdps(60):
        for n in (2, 7, 15, 64):
            u = rng.uniform(-1.0, 1.0, n)
            v = rng.uniform(-1.0, 1.0, n)
            want = float(mp.fdot(map(mp.mpf, u), map(mp.mpf, v)))
            assert _exact_dot(u, v) == want


def test_mapped_points_geometry(tables):
    pts = mapped_points(2.0, 6.0, np.array([-1.0, 0.0, 1.0]))
    assert np.array_equal(pts, [2.0, 4.0, 6.0])
    pts = mapped_points(0.25, 0.75, tables.nodes(9))
    assert np.all((pts > 0.25) & (pts < 0.75))


def test_batch_eval_counts_and_broadcasts():
    from hpquad import RunStats

    stats = RunStats()
    out = batch_eval(np.exp, np.array([0.0, 1.0]), stats)
    assert np.array_equal(out, [1.0, math.e])
    assert stats.vector_calls == 1 and stats.scalar_evals == 2
    # Scalar-returning integrands broadcast to the batch shape.
    out = batch_eval(lambda x: 3.0, np.zeros(4), stats)
    assert np.array_equal(out, np.full(4, 3.0))
    assert stats.vector_calls == 2 and stats.scalar_evals == 6
    # Empty batches are free.
    assert batch_eval(np.exp, np.empty(0), stats).size == 0
    assert stats.vector_calls == 2 and stats.scalar_evals == 6


def test_batch_eval_flags_non_finite():
    with pytest.raises(IntegrationError, match="x="):
        batch_eval(lambda x: np.where(x > 0.5, np.nan, 1.0), np.array([0.2, 0.7]))


def test_segment_quadrature_matches_rule(tables):
    fvals = np.exp(mapped_points(0.0, 2.0, tables.nodes(8)))
    q = segment_quadrature(0.0, 2.0, 8, fvals, tables)
    assert q == pytest.approx(math.expm1(2.0), rel=1e-15)


def _mode_mix_segment(a, b, p, tables):
    # Values whose mapped-basis interpolant has subleading coefficient
    # 2p-3 and leading coefficient 1, placing the ratio at exactly 1.
    nodes = tables.nodes(p)
    fvals = (
        2.0
        + nodes
        + (2 * p - 3) * legendre_eval(p - 2, nodes)
        + legendre_eval(p - 1, nodes)
    )
    return make_segment(a, b, p, fvals, tables)


def test_decide_refinement_three_ways(tables):
    cfg = AdaptiveConfig()
    # |x| sampled symmetrically kills the odd subleading mode exactly:
    # the roughest signal, so bisect.
    kink = make_segment(-1.0, 1.0, 5, np.abs(tables.nodes(5)), tables)
    assert decide_refinement(kink, tables, cfg) is Refinement.H_REFINE
    # A solidly smooth mode mix below the cap earns one more point.
    smooth = _mode_mix_segment(0.0, 1.0, 5, tables)
    assert decide_refinement(smooth, tables, cfg) is Refinement.P_REFINE
    # The same mix at the cap must split instead.
    capped = _mode_mix_segment(0.0, 1.0, 15, tables)
    assert decide_refinement(capped, tables, cfg) is Refinement.P_SATURATED_SPLIT


def test_plan_children_geometry(tables):
    cfg = AdaptiveConfig()
    seg = _mode_mix_segment(0.0, 1.0, 5, tables)
    assert _plan_children(seg, Refinement.P_REFINE, cfg, 1.0) == [(0.0, 1.0, 6)]
    assert _plan_children(seg, Refinement.H_REFINE, cfg, 1.0) == [
        (0.0, 0.5, 4),
        (0.5, 1.0, 4),
    ]
    assert _plan_children(seg, Refinement.P_SATURATED_SPLIT, cfg, 1.0) == [
        (0.0, 0.5, 5),
        (0.5, 1.0, 5),
    ]
    # Bisection never drops below the 2-point rule.
    low = _mode_mix_segment(0.0, 1.0, 2, tables)
    assert _plan_children(low, Refinement.H_REFINE, cfg, 1.0) == [
        (0.0, 0.5, 2),
        (0.5, 1.0, 2),
    ]
    # Too narrow to bisect: refused, demanding a forced accept.
    tiny = _mode_mix_segment(0.0, 1e-14, 5, tables)
    assert _plan_children(tiny, Refinement.H_REFINE, cfg, 1.0) is None


def test_integrate_smooth_polynomial_retires_whole():
    result = integrate(lambda x: x**3, 0.0, 1.0)
    assert result.value == pytest.approx(0.25, abs=1e-15)
    # Both rules are exact on a cubic, so refinement moves nothing beyond
    # table rounding and the interval retires whole within two passes,
    # recorded at the order it held when its refinement test passed.
    assert result.mesh.entries == ((0.0, 1.0, 6),)
    assert result.stats.passes == 2
    assert result.stats.forced_accepts == 0


def test_integrate_mesh_tiles_interval():
    result = integrate(lambda x: np.sqrt(np.abs(x - 0.3)), 0.0, 2.0)
    entries = result.mesh.entries
    assert entries[0][0] == 0.0 and entries[-1][1] == 2.0
    for prev, cur in zip(entries, entries[1:]):
        assert prev[1] == cur[0]
    assert math.fsum(result.mesh.widths) == pytest.approx(2.0, rel=1e-15)
    assert result.value == pytest.approx(
        (2.0 / 3.0) * (0.3**1.5 + 1.7**1.5), rel=1e-13
    )


def test_magnitude_hint_skips_coarse_estimate():
    f = np.exp
    base = integrate(f, 0.0, 1.0)
    hinted = integrate(f, 0.0, 1.0, AdaptiveConfig(magnitude_hint=2.0))
    assert hinted.value == base.value
    assert base.stats.vector_calls == hinted.stats.vector_calls + 1
    assert base.stats.scalar_evals == hinted.stats.scalar_evals + 8 * 5


def test_integrate_is_deterministic():
    f = lambda x: np.sqrt(np.abs(x - 1.0 / 3.0))  # noqa: E731
    r1 = integrate(f, 0.0, 1.0)
    r2 = integrate(f, 0.0, 1.0)
    assert r1.value == r2.value
    assert r1.stats == r2.stats
    assert r1.mesh.entries == r2.mesh.entries


def test_integrate_validation():
    with pytest.raises(ValueError):
        integrate(np.exp, 1.0, 1.0)
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, math.inf)
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, 1.0, AdaptiveConfig(p_max=15), tables=build_tables(10))
    with pytest.raises(ValueError, match="guard overflowed"):
        integrate(np.exp, 0.0, 1.0, AdaptiveConfig(tol=1e290, magnitude_hint=1e30))


def test_integrate_propagates_bad_integrand():
    with pytest.raises(IntegrationError):
        integrate(lambda x: np.where(x > 0.9, np.inf, 1.0), 0.0, 1.0)


def test_pass_limit_forces_acceptance():
    step = lambda x: np.where(x > 1.0 / 3.0, 1.0, 0.0)  # noqa: E731
    cfg = AdaptiveConfig(max_passes=3)
    with pytest.warns(RuntimeWarning, match="accepted without convergence"):
        result = integrate(step, 0.0, 1.0, cfg)
    assert result.stats.forced_accepts >= 1
    assert result.stats.passes == 3
    # Coarse, but the partial refinement still lands in the right region.
    assert result.value == pytest.approx(2.0 / 3.0, abs=0.1)


def test_width_floor_forces_acceptance():
    step = lambda x: np.where(x > 1.0 / 3.0, 1.0, 0.0)  # noqa: E731
    with pytest.warns(RuntimeWarning, match="accepted without convergence"):
        result = integrate(step, 0.0, 1.0)
    assert result.stats.forced_accepts >= 1
    # The jump is boxed into a floor-width cell, so the value is still
    # accurate to near working precision.
    assert result.value == pytest.approx(2.0 / 3.0, abs=1e-12)
    narrowest = float(np.min(result.mesh.widths))
    assert narrowest <= 2.0 * 64.0 * EPS


def test_refinement_counters_add_up():
    result = integrate(lambda x: np.sqrt(np.abs(x - 1.0 / 3.0)), 0.0, 1.0)
    stats = result.stats
    assert stats.h_refinements > 0
    assert stats.p_refinements > 0
    assert stats.scalar_evals > 0
    assert stats.vector_calls <= stats.passes + 2
