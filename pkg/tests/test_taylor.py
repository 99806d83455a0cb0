import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sparse_saddle.taylor as taylor_mod
from sparse_saddle.multiindex import (
    ContractViolation,
    DimensionMismatch,
    IndexSet,
    MultiIndex,
    is_downward_closed,
    monomial_eval,
    monotone_envelope,
)
from sparse_saddle.problems import build_global_parametrization, build_mixed_diffusion_1d
from sparse_saddle.saddle import assemble_at, rhs, solve_at
from sparse_saddle.taylor import (
    CSV_HEADER,
    InadmissibleRhoError,
    adaptive_construct,
    coefficient_bound_check,
    compute_coefficients,
    evaluate,
    explored_indices,
    indicator_values,
    kernel_residuals,
    pressure_bound_check,
)

from oracles import central_difference, compare_to_difference, joint_norm, second_difference

e = MultiIndex.unit


@pytest.fixture(scope="module")
def table_a1(a1_system):
    return compute_coefficients(a1_system, IndexSet.simplex(4, 5), workers=1)


@pytest.fixture(scope="module")
def small_system():
    return build_mixed_diffusion_1d(32, build_global_parametrization(3, 2.0, 0.3, 1.0))


def test_single_factorization(monkeypatch, a1_system):
    calls = []
    real = taylor_mod.lu_factor

    def counting(K):
        calls.append(K.shape)
        return real(K)

    monkeypatch.setattr(taylor_mod, "lu_factor", counting)
    compute_coefficients(a1_system, IndexSet.simplex(4, 3), workers=1)
    assert len(calls) == 1
    calls.clear()
    adaptive_construct(a1_system, 10, workers=1)
    assert len(calls) == 1


def test_root_is_nominal_solve(a1_system):
    t = compute_coefficients(a1_system, [MultiIndex.zero()])
    u, p = solve_at(a1_system, np.zeros(4))
    assert np.allclose(t[MultiIndex.zero()].t_u, u, rtol=0, atol=1e-15)
    assert np.allclose(t[MultiIndex.zero()].t_p, p, rtol=0, atol=1e-15)


def test_nonzero_coefficients_in_discrete_kernel(table_a1, a1_system):
    res = kernel_residuals(table_a1, a1_system.B)
    assert len(res) == len(table_a1) - 1
    assert max(res.values()) <= 1e-9


@pytest.mark.parametrize("j", [1, 2, 3])
def test_first_order_matches_central_difference(small_system, j):
    t = compute_coefficients(small_system, IndexSet.simplex(3, 2))
    h = 1e-4
    rel, _ = compare_to_difference(small_system, t[e(j)], central_difference(small_system, j, h), h, 1)
    assert rel <= 1e-6


@pytest.mark.parametrize("j", [1, 2, 3])
def test_second_order_matches_divided_difference(small_system, j):
    t = compute_coefficients(small_system, IndexSet.simplex(3, 2))
    h = 1e-3
    rel, _ = compare_to_difference(small_system, t[e(j, 2)], second_difference(small_system, j, h), h, 2)
    assert rel <= 1e-4


def test_odd_modes_leave_flux_unchanged(small_system):
    # a mode symmetric about x = 1/2 moves neither the mean nor the flux, so t_{e1}^u = 0
    t = compute_coefficients(small_system, IndexSet.simplex(3, 1))
    assert joint_norm(small_system, t[e(1)].t_u, 0 * t[e(1)].t_p) <= 1e-12
    assert t[e(2)].norm_u > 1e-4


def test_predecessors_required(a1_system):
    with pytest.raises(ContractViolation):
        compute_coefficients(a1_system, [MultiIndex.zero(), e(1, 2)])
    with pytest.raises(ContractViolation):
        compute_coefficients(a1_system, [])


def test_dimension_beyond_system(a1_system):
    with pytest.raises(DimensionMismatch):
        compute_coefficients(a1_system, [MultiIndex.zero(), e(5)])


def test_evaluate_at_origin_and_root_only(table_a1, a1_system):
    t0 = table_a1[MultiIndex.zero()]
    u, p = evaluate(table_a1, np.zeros(4))
    assert np.array_equal(u, t0.t_u) and np.array_equal(p, t0.t_p)
    u, p = evaluate(table_a1, [0.4, -0.2, 0.9, 1.0], indices=[MultiIndex.zero()])
    assert np.array_equal(u, t0.t_u)
    with pytest.raises(DimensionMismatch):
        evaluate(table_a1, [0.1, 0.2])


def test_surrogate_accuracy_J2():
    s = build_mixed_diffusion_1d(32, build_global_parametrization(2, 2.0, 0.3, 1.0))
    t = compute_coefficients(s, IndexSet.simplex(2, 6))
    rng = np.random.default_rng(3)
    for y in rng.uniform(-1, 1, (30, 2)):
        u, _ = solve_at(s, y)
        ua, _ = evaluate(t, y)
        assert joint_norm(s, u - ua, 0 * s.g) <= 1e-4 * joint_norm(s, u, 0 * s.g)


def test_truncation_residual_identity():
    # K(y) T x(y) - F = [sum over the boundary of y^nu A_j t_{nu - e_j}; 0] for nu just outside Lambda
    s = build_mixed_diffusion_1d(16, build_global_parametrization(2, 2.0, 0.3, 1.0))
    lam = IndexSet.simplex(2, 3)
    big = compute_coefficients(s, IndexSet.simplex(2, 4))
    y = np.array([0.7, -0.4])
    u, p = evaluate(big, y, indices=lam)
    r = assemble_at(s, y) @ np.concatenate([u, p]) - rhs(s)
    expect = np.zeros(s.n_u)
    for nu in lam:
        for j in (1, 2):
            mu = nu.add_unit(j)
            if mu not in lam:
                expect += monomial_eval(mu, y) * (s.A_terms[j - 1] @ big[nu].t_u)
    assert np.abs(r[: s.n_u] - expect).max() <= 1e-12 * max(1.0, np.abs(expect).max())
    assert np.abs(r[s.n_u :]).max() <= 1e-12


def test_deterministic_and_order_invariant(a1_system):
    lam = IndexSet.simplex(4, 3)
    a = compute_coefficients(a1_system, lam, workers=1)
    b = compute_coefficients(a1_system, IndexSet(reversed(lam.insertion_order)), workers=4)
    for nu in lam:
        assert np.array_equal(a[nu].t_u, b[nu].t_u) and np.array_equal(a[nu].t_p, b[nu].t_p)


# ---- adaptive construction


def test_adaptive_single_index(a1_system):
    lam, table = adaptive_construct(a1_system, 1)
    assert lam.insertion_order == [MultiIndex.zero()]
    assert len(table) == 1


def test_adaptive_second_index_is_e1():
    s = build_mixed_diffusion_1d(32, build_global_parametrization(6, 3.0, 0.3, 1.0))
    lam, table = adaptive_construct(s, 2)
    assert lam.insertion_order[1] == e(1)


def test_adaptive_sets_are_nested_and_closed(a1_system):
    lam, table = adaptive_construct(a1_system, 25, weight_u=0.5)
    order = lam.insertion_order
    assert len(order) == 25
    for k in range(1, 26):
        assert is_downward_closed(order[:k])
    assert set(explored_indices(table)).isdisjoint(order)
    # the explored frontier carries real coefficients
    assert all(nu in table for nu in explored_indices(table))


def test_adaptive_envelope_is_monotone(a1_system):
    lam, table = adaptive_construct(a1_system, 30, weight_u=0.5)
    ind = indicator_values(table, 0.5, lam)
    env = monotone_envelope(ind)
    for nu in lam:
        for mu in nu.backward_neighbors():
            assert env[mu] >= env[nu]


def test_adaptive_argument_errors(a1_system):
    with pytest.raises(ValueError):
        adaptive_construct(a1_system, 0)
    with pytest.raises(ValueError):
        adaptive_construct(a1_system, 5, weight_u=1.5)


def test_adaptive_stops_when_nothing_left():
    s = build_mixed_diffusion_1d(16, build_global_parametrization(0, 2.0, 0.3, 1.0))
    lam, _ = adaptive_construct(s, 10)
    assert len(lam) == 1


# ---- coefficient bounds


def test_bound_check_with_generous_constant(table_a1):
    assert coefficient_bound_check(table_a1, np.full(4, 1 + 1e-9), 1e6) == []


def test_bound_check_reports_violations(table_a1):
    bad = coefficient_bound_check(table_a1, [50.0, 50.0, 50.0, 50.0], 1e-3)
    assert MultiIndex.zero() in bad
    assert bad == sorted(bad)


def test_bound_check_rejects_small_rho(table_a1):
    with pytest.raises(InadmissibleRhoError):
        coefficient_bound_check(table_a1, [1.0, 2.0, 2.0, 2.0], 1.0)
    with pytest.raises(InadmissibleRhoError):
        pressure_bound_check(table_a1, [0.5, 2.0, 2.0, 2.0], 1.0)


def test_pressure_check_skips_root(table_a1):
    assert MultiIndex.zero() not in pressure_bound_check(table_a1, np.full(4, 2.0), 0.0)


# ---- table serialization


def test_csv_format(table_a1):
    text = table_a1.to_csv()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == len(table_a1.index_set) + 1
    first = lines[1].split(",")
    assert first[0] == MultiIndex.zero().encode() and first[1] == "0"
    assert float(first[2]) == table_a1[MultiIndex.zero()].norm_u


def test_vectors_text_round_trip(a1_system):
    t = compute_coefficients(a1_system, IndexSet.simplex(4, 1))
    for line in t.vectors_text().splitlines():
        key, vals = line.split("\t")
        c = t[MultiIndex.decode(key)]
        assert np.array_equal(np.array(vals.split(), dtype=float), np.concatenate([c.t_u, c.t_p]))


@settings(max_examples=15)
@given(st.lists(st.floats(-1, 1), min_size=2, max_size=2))
def test_evaluate_matches_solve_for_small_amplitude(y):
    s = _tiny()
    t = _tiny_table()
    u, p = solve_at(s, y)
    ua, pa = evaluate(t, y)
    assert joint_norm(s, u - ua, p - pa) <= 1e-8 * joint_norm(s, u, p)


_CACHE = {}


def _tiny():
    if "sys" not in _CACHE:
        _CACHE["sys"] = build_mixed_diffusion_1d(16, build_global_parametrization(2, 2.0, 0.05, 1.0))
    return _CACHE["sys"]


def _tiny_table():
    if "table" not in _CACHE:
        _CACHE["table"] = compute_coefficients(_tiny(), IndexSet.simplex(2, 8))
    return _CACHE["table"]
