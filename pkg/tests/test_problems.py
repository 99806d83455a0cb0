import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparse_saddle.linalg import lu_factor
from sparse_saddle.problems import (
    CallableField,
    ConstantField,
    ConstantVectorField,
    EllipticityError,
    MacLayout,
    build_global_parametrization,
    build_local_parametrization,
    build_mixed_diffusion_1d,
    build_stokes_mac_2d,
    constant_parametrization,
    diffusion_constants,
    discrete_poincare_constant,
    maxwell_coercivity,
    reflect_y,
    stokes_constants,
)
from sparse_saddle.problems.diffusion import cell_centers, nodes
from sparse_saddle.saddle import estimate_infsup, solve_at


# ---- parametrizations


def test_constant_field_for_J_zero():
    p = build_global_parametrization(0, 2.0, 0.3, 1.0)
    assert p.J == 0 and p.kappa_min == p.kappa_max == 1.0


def test_global_range_against_grid_minimum():
    p = build_global_parametrization(4, 2.0, 0.3, 1.0)
    x = np.linspace(0, 1, 1024)
    spread = sum(0.3 * j**-2 * np.abs(np.sin(j * np.pi * x)) for j in range(1, 5))
    assert p.kappa_min == pytest.approx((1 - spread).min(), abs=1e-14)
    assert p.kappa_min >= 1 - 0.3 * (1 + 1 / 4 + 1 / 9 + 1 / 16)


def test_global_sup_norms_strictly_decreasing():
    s = build_global_parametrization(10, 2.5, 0.3, 1.0).sup_norms
    assert all(a > b for a, b in zip(s, s[1:]))


def test_global_ellipticity_rejected():
    with pytest.raises(EllipticityError):
        build_global_parametrization(4, 1.1, 0.9, 1.0)


@pytest.mark.parametrize("kw", [dict(sigma=1.0), dict(c=0.0), dict(J=-1)])
def test_global_argument_errors(kw):
    args = dict(J=3, sigma=2.0, c=0.3, kappa0_const=1.0) | kw
    with pytest.raises(ValueError):
        build_global_parametrization(**args)


def test_global_2d_modes():
    p = build_global_parametrization(4, 2.0, 0.3, 1.0, dim=2)
    assert [t.freqs for t in p.terms] == [(1, 1), (1, 2), (2, 2), (2, 3)]


def test_local_single_cell():
    p = build_local_parametrization(1, [0.5], 1.0)
    assert p.kappa_min == 0.5 and p.kappa_max == 1.5


def test_local_disjoint_cells():
    w = [0.5 * j**-0.5 for j in range(1, 9)]
    p = build_local_parametrization(8, w, 1.0)
    assert p.kappa_min == pytest.approx(0.5, abs=1e-15)
    vals = p.term_values(p.grid())
    assert np.count_nonzero(vals, axis=0).max() == 1


def test_local_rejections():
    with pytest.raises(EllipticityError):
        build_local_parametrization(2, [0.95, 0.1], 1.0)
    with pytest.raises(ValueError):
        build_local_parametrization(3, [0.1, 0.1], 1.0)


def test_theta_above_kappa_min_rejected():
    with pytest.raises(EllipticityError):
        constant_parametrization(1.0, theta=1.0)


@given(st.floats(1.2, 4.0), st.floats(0.4, 0.9), st.integers(1, 12))
def test_ls_summability_of_global_amplitudes(sigma, s, J):
    # j^-sigma is in l^s whenever s sigma > 1; partial sums are bounded by the zeta value
    if s * sigma <= 1.05:
        return
    p = build_global_parametrization(J, sigma, 0.05, 1.0)
    partial = math.fsum(a**s for a in p.sup_norms)
    bound = 0.05**s * (1 + 1 / (s * sigma - 1))
    assert partial <= bound * (1 + 1e-12)


def test_sup_difference_and_evaluate():
    p = build_global_parametrization(2, 2.0, 0.3, 1.0)
    assert p.sup_difference([0.5, 0.0], [-0.5, 0.0]) == pytest.approx(0.3, rel=1e-5)
    x = np.array([[0.5]])
    assert p.evaluate([1.0, 1.0], x)[0] == pytest.approx(1.3)
    with pytest.raises(ValueError):
        p.evaluate([1.0], x)


# ---- mixed diffusion 1D


def test_weighted_assembly_with_unit_weight_is_flux_mass():
    s = build_mixed_diffusion_1d(16, constant_parametrization(1.0))
    assert np.array_equal(s.a1_weighted(ConstantField(1.0)), s.M_L2)
    assert np.allclose(s.A_kappa0, s.M_L2, atol=1e-15)


def test_divergence_has_full_row_rank():
    for n in (8, 33, 64):
        B = build_mixed_diffusion_1d(n, constant_parametrization(1.0)).B
        # B B^T is SPD exactly when B has full row rank; factor it with pivoting
        lu_factor(B @ B.T)
        assert np.linalg.matrix_rank(B) == n


def test_manufactured_first_order_convergence():
    f = CallableField(lambda x: np.pi**2 * np.sin(np.pi * x[:, 0]))
    errs_u, errs_p = [], []
    for n in (16, 32, 64):
        s = build_mixed_diffusion_1d(n, constant_parametrization(1.0), f)
        u, p = solve_at(s, [])
        errs_u.append(np.abs(u - np.pi * np.cos(np.pi * nodes(n))).max())
        errs_p.append(np.abs(p - np.sin(np.pi * cell_centers(n))).max())
    for e in (errs_u, errs_p):
        rates = [math.log2(a / b) for a, b in zip(e, e[1:])]
        assert min(rates) >= 0.9


def test_resolution_and_dimension_checks():
    with pytest.raises(ValueError):
        build_mixed_diffusion_1d(3, constant_parametrization(1.0))
    with pytest.raises(ValueError):
        build_mixed_diffusion_1d(8, constant_parametrization(1.0, dim=2))


# ---- Poincare constant


def test_poincare_constant_converges_to_inverse_pi_squared():
    vals = {n: discrete_poincare_constant(build_mixed_diffusion_1d(n, constant_parametrization(1.0))) for n in (32, 64, 128)}
    ref = 1 / math.pi**2
    assert abs(vals[64] - ref) <= 0.1 * ref
    assert abs(vals[128] - ref) <= 0.1 * ref
    assert abs(vals[128] - vals[64]) <= 0.05 * vals[64]
    for n, c in vals.items():
        beta = estimate_infsup(build_mixed_diffusion_1d(n, constant_parametrization(1.0)))
        assert beta >= 1 / math.sqrt(1 + c) - 1e-8


# ---- Stokes MAC


@pytest.fixture(scope="module")
def stokes():
    return build_stokes_mac_2d(8, 8, constant_parametrization(1.0, dim=2))


def test_stokes_layout_counts():
    L = MacLayout(8, 6)
    assert L.n_u1 == 8 * 6 and L.n_u2 == 8 * 5 and L.n_p == 48
    assert len({L.u1(i, j) for i in range(1, 9) for j in range(6)} | {L.u2(i, j) for i in range(8) for j in range(1, 6)}) == L.n_u


def test_stokes_operators_symmetric(stokes):
    assert np.abs(stokes.A_kappa0 - stokes.A_kappa0.T).max() <= 1e-12
    assert np.abs(stokes.M_V - stokes.M_V.T).max() <= 1e-12


def test_stokes_zero_force():
    s = build_stokes_mac_2d(8, 8, constant_parametrization(1.0, dim=2), ConstantVectorField((0.0, 0.0)))
    u, p = solve_at(s, [])
    assert not u.any() and not p.any()


def test_stokes_divergence_free():
    param = build_global_parametrization(3, 2.0, 0.3, 1.0, dim=2)
    s = build_stokes_mac_2d(8, 8, param)
    u, _ = solve_at(s, [0.5, -0.5, 1.0])
    assert np.linalg.norm(s.B @ u) <= 1e-9 * max(np.linalg.norm(u), 1.0)


@pytest.mark.parametrize(
    "force",
    [None, CallableField(lambda x: np.column_stack([4 * x[:, 1] * (1 - x[:, 1]), np.zeros(len(x))]))],
    ids=["constant", "parabolic"],
)
def test_stokes_reflection_symmetry(force):
    nx = ny = 8
    s = build_stokes_mac_2d(nx, ny, constant_parametrization(1.0, dim=2), force)
    u, p = solve_at(s, [])
    ur, pr = reflect_y(MacLayout(nx, ny), u, p)
    assert np.abs(u - ur).max() <= 1e-9
    assert np.abs(p - pr).max() <= 1e-9
    if force is not None:
        assert np.abs(u).max() > 1e-3


def test_stokes_infsup_positive(stokes):
    assert estimate_infsup(stokes) > 0.1


# ---- closed-form constants


def test_stokes_constants_examples():
    assert stokes_constants(1, 1, 1, 1, 0) == (2.0, 1.0, 2.0, 1.0)
    assert stokes_constants(1, 1, 1, 1, 3).beta == 0.5
    assert stokes_constants(1, 2, 1, 0.5, 0).gamma == 2.0


def test_diffusion_constants_examples():
    assert diffusion_constants(1, 1, 0) == (1.0, 1.0, 1.0, 1.0)
    assert diffusion_constants(0.5, 2, 3) == (2.0, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        diffusion_constants(2, 1, 0)


@given(st.floats(1e-3, 10), st.floats(1e-3, 10), st.floats(0, 10))
def test_diffusion_alpha_not_above_gamma(a, b, cp):
    lo, hi = min(a, b), max(a, b)
    c = diffusion_constants(lo, hi, cp)
    assert c.alpha <= c.gamma


def test_maxwell_examples():
    assert maxwell_coercivity(1, 1, 0, 2) == (1 / 3, False)
    r = maxwell_coercivity(1, 1, 0.5, 2)
    assert r.alpha == pytest.approx(1 / 6) and not r.noncoercive
    z = maxwell_coercivity(2, 1, 1, 2)
    assert z.alpha == 0.0 and z.noncoercive
    with pytest.raises(ValueError):
        maxwell_coercivity(-1, 1, 1, 1)
