"""Normal-mode predictions: closed forms vs determinants vs actual runs."""

import numpy as np
import pytest
from hypothesis import given, assume, settings, strategies as st
from scipy.optimize import brentq

from bodywave.materials import FluidMaterial
from bodywave.stability import (
    AmplificationReport,
    DegenerateQuadratic,
    GrowthConfig,
    StabilityQuery,
    count_unstable_modes,
    empirical_growth_rate,
    first_order_determinant,
    lw_characteristic_roots,
    max_stable_dt_traditional,
    roots_first_order_projection,
    roots_first_order_traditional,
    second_order_determinant,
    second_order_system_matrix,
)


def _det_scale(det_fn, q):
    """Typical determinant magnitude on a nearby ring, for relative zeros."""
    ring = 1.5 * np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False))
    return np.median(np.abs(det_fn(ring, q)))


# -- closed-form first-order roots -------------------------------------------


def test_max_stable_dt_examples():
    assert max_stable_dt_traditional(1.0, 1.0, 1.0) == 3.0
    val = max_stable_dt_traditional(1e-6, np.sqrt(2.0), 0.9)
    assert abs(val * 1e6 - 2.436) < 5e-4, f"got {val}"


def test_traditional_roots_are_determinant_zeros():
    for lam, dt, m in [(0.5, 1e-3, 1e-2), (0.9, 5e-3, 1e-3), (1.0, 0.2, 1.0)]:
        q = StabilityQuery(lam, dt, m, np.sqrt(2.0), 0.0)
        rep = roots_first_order_traditional(q)
        scale = _det_scale(first_order_determinant, q)
        for root in rep.roots:
            res = abs(first_order_determinant(np.array(root), q)) / scale
            assert res < 1e-9, f"det residual {res} at root {root}"


def test_projection_root_is_determinant_zero():
    z = np.sqrt(2.0)
    for m, dt in [(1.0, 0.01), (1e-3, 0.02), (0.0, 0.1)]:
        q = StabilityQuery(0.8, dt, m, z, z)
        rep = roots_first_order_projection(q)
        (root,) = rep.roots
        assert root == m / (m + 2.0 * dt * z)
        scale = _det_scale(first_order_determinant, q)
        assert abs(first_order_determinant(np.array(root), q)) / scale < 1e-12


def test_boundary_step_gives_marginal_root():
    # At dt exactly at the bound the third root is -1; just past it, |A| > 1.
    m, z, lam = 1e-3, np.sqrt(2.0), 0.7
    bound = max_stable_dt_traditional(m, z, lam)
    rep = roots_first_order_traditional(StabilityQuery(lam, bound, m, z, 0.0))
    assert min(abs(r + 1.0) for r in rep.roots) < 1e-12
    assert abs(rep.max_modulus - 1.0) < 1e-12 and rep.stable
    rep2 = roots_first_order_traditional(StabilityQuery(lam, 1.001 * bound, m, z, 0.0))
    assert rep2.max_modulus > 1.0 + 1e-5 and not rep2.stable


def test_complex_pair_modulus_squared_is_one_minus_half_lambda():
    # Vieta: when the discriminant is negative, A2 A3 = |A|^2 = 1 - lam/2.
    m, z, lam = 1.0, 1.0, 0.8
    q = StabilityQuery(lam, 0.05 * max_stable_dt_traditional(m, z, lam), m, z, 0.0)
    rep = roots_first_order_traditional(q)
    pair = [r for r in rep.roots if abs(r.imag) > 0]
    assert len(pair) == 2
    assert abs(abs(pair[0]) ** 2 - (1.0 - 0.5 * lam)) < 1e-13
    assert abs(abs(pair[0]) - abs(pair[1])) < 1e-15


def test_real_regime_roots_stay_below_one():
    # Real roots of the traditional coupling never exceed 1 (instability
    # there is always through A < -1).
    for lam in (0.25, 0.5, 0.9, 1.0):
        for mult in (0.9, 1.0, 1.5, 3.0, 10.0):
            bound = max_stable_dt_traditional(1e-3, 2.0, lam)
            q = StabilityQuery(lam, mult * bound, 1e-3, 2.0, 0.0)
            rep = roots_first_order_traditional(q)
            real = [r for r in rep.roots if r.imag == 0.0]
            assert all(r.real < 1.0 for r in real)


def test_massless_traditional_reports_unbounded():
    q = StabilityQuery(0.9, 1e-3, 0.0, 1.0, 0.0)
    rep = roots_first_order_traditional(q)
    assert rep.unbounded and not rep.stable
    assert rep.max_modulus is None
    assert rep.roots == (complex(1.0 - 0.45),)


def test_projection_stable_for_random_queries():
    rng = np.random.default_rng(7)
    n = 10_000
    lam = rng.uniform(1e-3, 1.0, n)
    dt = 10.0 ** rng.uniform(-8.0, 2.0, n)
    mass = 10.0 ** rng.uniform(-12.0, 3.0, n)
    mass[::97] = 0.0
    z = 10.0 ** rng.uniform(-3.0, 3.0, n)
    for i in range(n):
        rep = roots_first_order_projection(
            StabilityQuery(lam[i], dt[i], mass[i], z[i], z[i])
        )
        assert rep.stable and rep.max_modulus < 1.0


def test_report_rejects_inconsistent_max_modulus():
    with pytest.raises(ValueError):
        AmplificationReport(roots=(0.5 + 0j,), max_modulus=0.9, stable=True)


# -- Lax-Wendroff spatial roots ----------------------------------------------


@given(
    nu=st.floats(-1.0, 1.0, allow_nan=False),
    re=st.floats(-5.0, 5.0),
    im=st.floats(-5.0, 5.0),
)
@settings(max_examples=200, deadline=None)
def test_lw_roots_satisfy_vieta(nu, re, im):
    assume(abs(nu) > 1e-3 and abs(nu + 1.0) > 1e-3)
    A = complex(re, im)
    out = lw_characteristic_roots(nu, A)
    assert not out.degenerate and len(out.roots) == 2
    r1, r2 = out.roots
    q2 = 0.5 * (nu + nu * nu)
    prod_ref = 0.5 * (nu * nu - nu) / q2
    sum_ref = (A - 1.0 + nu * nu) / q2
    scale = 1.0 + abs(prod_ref) + abs(sum_ref)
    assert abs(r1 * r2 - prod_ref) < 1e-10 * scale
    assert abs(r1 + r2 - sum_ref) < 1e-10 * scale


def test_lw_roots_at_unit_amplification_include_one():
    for nu in (-0.8, 0.8, 0.3):
        out = lw_characteristic_roots(nu, 1.0 + 0j)
        assert min(abs(r - 1.0) for r in out.roots) < 1e-9


def test_lw_roots_split_inside_outside_for_growing_modes():
    rng = np.random.default_rng(3)
    for nu in (-0.8, -0.4, 0.4, 0.8):
        for theta in rng.uniform(0.0, 2.0 * np.pi, 25):
            out = lw_characteristic_roots(nu, 1.1 * np.exp(1j * theta))
            r1, r2 = out.roots
            assert abs(r1) < 1.0 < abs(r2)
            assert out.inside == (True, False)
            assert abs(r1) <= abs(r2)


def test_lw_degenerate_cases():
    out = lw_characteristic_roots(0.0, 2.0 + 0j)
    assert out.degenerate and out.roots == (0.0 + 0j,)
    out = lw_characteristic_roots(-1.0, 2.0 + 0j)
    assert out.degenerate and abs(out.roots[0] - 0.5) < 1e-15
    with pytest.raises(DegenerateQuadratic):
        lw_characteristic_roots(0.0, 1.0 + 0j)
    with pytest.raises(DegenerateQuadratic):
        lw_characteristic_roots(-1.0, 0.0 + 0j)
    with pytest.raises(ValueError):
        lw_characteristic_roots(1.5, 2.0 + 0j)


# -- second-order eigen system -----------------------------------------------


def test_coupling_root_zeroes_body_row_coefficient():
    # The trapezoidal interface recursion root A = (m - dt z)/(m + dt z)
    # annihilates the body-row velocity coefficient of the projected system.
    z = np.sqrt(2.0)
    for m, dt in [(1.0, 0.01), (1e-2, 0.03), (1e-6, 0.1)]:
        q = StabilityQuery(0.9, dt, m, z, z)
        a_star = (m - dt * z) / (m + dt * z)
        entry = second_order_system_matrix(np.array(a_star + 0j), q)[4, 4]
        assert abs(entry) < 1e-12 * (1.0 + 2.0 * m / (dt * z))


def test_second_order_determinant_finite_at_unit_courant():
    # lambda = 1 degenerates the rightward-family quadratic; the outside
    # root escapes to infinity and its reciprocal must enter as 0.
    q = StabilityQuery(1.0, 0.01, 1e-3, np.sqrt(2.0), np.sqrt(2.0))
    ring = 1.3 * np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 128, endpoint=False))
    vals = second_order_determinant(ring, q)
    assert np.all(np.isfinite(vals))


def test_count_unstable_first_order_positive_control():
    # The winding count must flag the closed-form instability: one real
    # root below -1 at twice the bound, none at half the bound.
    m, z, lam = 1e-3, np.sqrt(2.0), 0.5
    bound = max_stable_dt_traditional(m, z, lam)
    q_bad = StabilityQuery(lam, 2.0 * bound, m, z, 0.0)
    q_ok = StabilityQuery(lam, 0.5 * bound, m, z, 0.0)
    assert count_unstable_modes(first_order_determinant, q_bad) == 1
    assert count_unstable_modes(first_order_determinant, q_ok) == 0


def test_count_unstable_second_order_projection_is_zero():
    z = np.sqrt(2.0)
    for lam in (0.5, 0.9):
        for m, dt in [(1e-3, 1e-4), (1.0, 0.05), (1e-6, 0.01), (0.0, 0.02)]:
            q = StabilityQuery(lam, dt, m, z, z)
            assert count_unstable_modes(second_order_determinant, q) == 0, (
                f"spurious growing mode at lam={lam}, m={m}, dt={dt}"
            )


def test_count_unstable_second_order_traditional_light_body():
    # The traditional coupling at second order loses stability below the
    # first-order bound: a pair of growing modes is already present at half
    # that time step (complex pair there, two real roots further up).
    m, z, lam = 1e-3, np.sqrt(2.0), 0.8
    bound = max_stable_dt_traditional(m, z, lam)
    for mult in (0.5, 2.0, 5.0):
        q = StabilityQuery(lam, mult * bound, m, z, 0.0)
        n = count_unstable_modes(second_order_determinant, q)
        assert n == 2, f"mult={mult}: count={n}"


def _real_axis_roots(det_fn, q, lo=1.005, hi=80.0, samples=8000):
    """All real determinant zeros with lo < |A| < hi (both half-axes)."""
    roots = []
    for sgn in (-1.0, 1.0):
        xs = sgn * np.linspace(lo, hi, samples)
        vals = np.array([det_fn(np.complex128(x), q).real for x in xs])
        for i in np.where(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
            roots.append(brentq(
                lambda x: det_fn(np.complex128(x), q).real, xs[i], xs[i + 1],
                xtol=1e-13,
            ))
    return roots


# -- empirical growth vs prediction ------------------------------------------


def test_traditional_bound_predicts_measured_growth():
    # Sweep (lambda, dt/bound) over the grid; every point is at least 10%
    # away from the stability boundary, so prediction and measurement must
    # agree on the verdict.
    mat = FluidMaterial(rho=1.0, c=np.sqrt(2.0))
    m = 1e-3
    for lam in (0.25, 0.5, 0.9, 1.0):
        bound = max_stable_dt_traditional(m, mat.z, lam)
        for mult in (0.5, 0.9, 1.1, 2.0):
            dt = mult * bound
            q = StabilityQuery(lam, dt, m, mat.z, 0.0)
            predicted = roots_first_order_traditional(q)
            cfg = GrowthConfig(mat, m, dt, lam, 0.0, "first", n_cells=60, seed=11)
            rate = empirical_growth_rate(cfg, n_steps=400)
            if predicted.stable:
                assert rate <= 1.0 + 1e-6, f"lam={lam} mult={mult}: rate={rate}"
            else:
                assert rate > 1.05, f"lam={lam} mult={mult}: rate={rate}"
                assert abs(rate - predicted.max_modulus) < 0.05 * predicted.max_modulus


def test_projection_measured_stable_both_schemes():
    mat = FluidMaterial(rho=1.0, c=np.sqrt(2.0))
    for scheme in ("first", "second"):
        cfg = GrowthConfig(mat, 1e-3, 5e-3, 0.9, mat.z, scheme, n_cells=60, seed=4)
        rate = empirical_growth_rate(cfg, n_steps=300)
        assert rate <= 1.0 + 1e-6, f"{scheme}: rate={rate}"


def test_second_order_traditional_root_matches_measured_growth():
    # Dual route: the dominant (negative real) determinant zero and the
    # measured per-step rate of an actual run must agree, pinning the sign
    # structure of the body row away from alpha = z.
    mat = FluidMaterial(rho=1.0, c=np.sqrt(2.0))
    m, lam = 1e-3, 0.8
    bound = max_stable_dt_traditional(m, mat.z, lam)
    for mult in (2.0, 5.0):
        dt = mult * bound
        q = StabilityQuery(lam, dt, m, mat.z, 0.0)
        roots = _real_axis_roots(second_order_determinant, q)
        assert roots, f"mult={mult}: no real roots found"
        dominant = max(abs(r) for r in roots)
        cfg = GrowthConfig(mat, m, dt, lam, 0.0, "second", n_cells=100, seed=0)
        rate = empirical_growth_rate(cfg, n_steps=600)
        assert abs(dominant - rate) < 1e-6 * rate, (
            f"mult={mult}: root modulus {dominant} vs measured {rate}"
        )


def test_second_order_traditional_grows_below_first_order_bound():
    # At half the first-order bound the first-order closed form is still
    # comfortably stable, yet the second-order run grows through a complex
    # pair that the winding count sees.
    mat = FluidMaterial(rho=1.0, c=np.sqrt(2.0))
    m, lam = 1e-3, 0.8
    dt = 0.5 * max_stable_dt_traditional(m, mat.z, lam)
    q = StabilityQuery(lam, dt, m, mat.z, 0.0)
    assert roots_first_order_traditional(q).stable
    assert count_unstable_modes(second_order_determinant, q) == 2
    cfg = GrowthConfig(mat, m, dt, lam, 0.0, "second", n_cells=100, seed=0)
    rate = empirical_growth_rate(cfg, n_steps=600)
    assert 1.7 < rate < 1.9, f"rate={rate}"
