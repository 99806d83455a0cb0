"""Acceptance suite: one PASS/FAIL line per criterion (A1 to A12).

Run ``pytest tests/test_acceptance.py -v``; the lines are collected into an
``acceptance`` section of the terminal summary. Tolerances are fixed constants
below and are never adjusted to make a run pass.
"""
import time
from pathlib import Path

import numpy as np
import pytest

from sparse_saddle.analysis import (
    construct_admissible_rho,
    validate_sup_error,
    validation_points,
    weighted_l2_level_sums,
)
from sparse_saddle.config import parse_config_text
from sparse_saddle.cli import main, run_experiment
from sparse_saddle.linalg import gram_norm
from sparse_saddle.multiindex import IndexSet, MultiIndex, monotone_envelope, stechkin_curve
from sparse_saddle.problems import (
    build_global_parametrization,
    build_mixed_diffusion_1d,
    constant_parametrization,
    discrete_poincare_constant,
)
from sparse_saddle.saddle import estimate_infsup, perturbation_check, solve_at, well_posedness
from sparse_saddle.taylor import coefficient_bound_check, compute_coefficients, evaluate, kernel_residuals

from oracles import central_difference, compare_to_difference, second_difference

REPO = Path(__file__).resolve().parents[1]
RATE_CONFIG = REPO / "configs" / "diffusion_rate.cfg"

KERNEL_TOL = 1e-9
A1_SECONDS = 10.0
FD1_H, FD1_TOL = 1e-4, 1e-6
FD2_H, FD2_TOL = 1e-3, 1e-4
SURROGATE_TOL = 1e-4
RATE_MIN = 1.5
A4_SECONDS = 60.0
RATE_DRIFT = 0.3
SLACK = 0.05
POINCARE_REL = 0.10
INFSUP_TOL = 1e-8

RESULTS = []


def record(tag, ok, detail):
    line = f"{tag}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def a1_table(a1_system):
    return compute_coefficients(a1_system, IndexSet.simplex(4, 5))


def rate_config(tmp_dir, J=None):
    text = RATE_CONFIG.read_text()
    lines = [l for l in text.splitlines() if not l.startswith("output.")]
    if J is not None:
        lines = [f"param.J = {J}" if l.startswith("param.J") else l for l in lines]
    lines += [f"output.directory = {tmp_dir}"]
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="module")
def a4_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("a4")
    t0 = time.perf_counter()
    summary = run_experiment(parse_config_text(rate_config(out)))
    return summary, time.perf_counter() - t0, out


def test_A1_kernel_condition(a1_system):
    t0 = time.perf_counter()
    table = compute_coefficients(a1_system, IndexSet.simplex(4, 5))
    res = kernel_residuals(table, a1_system.B)
    elapsed = time.perf_counter() - t0
    worst = max(res.values())
    record(
        "A1",
        worst <= KERNEL_TOL and elapsed < A1_SECONDS,
        f"max ||B t||/(1+||t||) = {worst:.3g} over {len(res)} indices, {elapsed:.2f} s",
    )


def test_A2_derivative_oracle(a1_system, a1_table):
    worst1 = worst2 = 0.0
    floors = []
    for j in range(1, 5):
        r1, f1 = compare_to_difference(a1_system, a1_table[MultiIndex.unit(j)], central_difference(a1_system, j, FD1_H), FD1_H, 1)
        r2, f2 = compare_to_difference(
            a1_system, a1_table[MultiIndex.unit(j, 2)], second_difference(a1_system, j, FD2_H), FD2_H, 2
        )
        worst1, worst2 = max(worst1, r1), max(worst2, r2)
        floors += [f"t^{c}_e{j}" for c in f1] + [f"t^{c}_2e{j}" for c in f2]
    record(
        "A2",
        worst1 <= FD1_TOL and worst2 <= FD2_TOL,
        f"worst relative: first order {worst1:.2g}, second order {worst2:.2g}; "
        f"vanishing at roundoff level: {', '.join(floors) or 'none'}",
    )


def test_A3_surrogate_accuracy():
    sys = build_mixed_diffusion_1d(64, build_global_parametrization(2, 2.0, 0.3, 1.0))
    table = compute_coefficients(sys, IndexSet.simplex(2, 6))
    rep = validate_sup_error(sys, table, 100)
    u0, _ = solve_at(sys, np.zeros(2))
    ua, _ = evaluate(table, np.zeros(2))
    err0 = gram_norm(u0 - ua, sys.M_V) / gram_norm(u0, sys.M_V)
    assert len(rep.records) == 104
    record(
        "A3",
        rep.sup_relative_u <= SURROGATE_TOL and err0 <= 4 * np.finfo(float).eps,
        f"sup relative V error {rep.sup_relative_u:.3g} over 104 points, error at y = 0 {err0:.2g}",
    )


def test_A4_rate_reproduction(a4_run):
    summary, elapsed, _ = a4_run
    r = summary["fitted_rate_u"]
    record("A4", r >= RATE_MIN and elapsed < A4_SECONDS, f"fitted rate u = {r:.3f} on N in [15, 120], {elapsed:.1f} s")


def test_A5_dimension_independence(a4_run, tmp_path):
    summary24 = run_experiment(parse_config_text(rate_config(tmp_path, J=24)))
    r12, r24 = a4_run[0]["fitted_rate_u"], summary24["fitted_rate_u"]
    record("A5", abs(r12 - r24) <= RATE_DRIFT, f"J = 12: {r12:.3f}, J = 24: {r24:.3f}, change {abs(r12 - r24):.3f}")


def test_A6_stechkin_property():
    rng = np.random.default_rng(6)
    violations = checked = 0
    for k in range(50):
        s = (0.4, 0.6, 0.8)[k % 3]
        n = int(rng.integers(1, 2001))
        # decay just fast enough to be in l^s, random scale, order and zeros
        a = 1 / s + rng.uniform(0.01, 1.0)
        seq = rng.uniform(0.1, 10) * np.arange(1, n + 1) ** -a * rng.uniform(0.5, 1.0, n)
        seq[rng.random(n) < 0.1] = 0.0
        rng.shuffle(seq)
        N = np.arange(1, n + 1)
        tails, bounds = stechkin_curve(seq, s, N)
        violations += int(np.sum(tails > bounds))
        checked += n
    record("A6", violations == 0, f"{violations} violations over {checked} (sequence, N) pairs")


def test_A7_coefficient_bound(a1_system, a1_table):
    rep = well_posedness(a1_system)
    rho = construct_admissible_rho(a1_system.kappa_meta, 0.3, a1_system.quad_points)
    bad = coefficient_bound_check(a1_table, rho.values, rep.C_u, SLACK)
    ratio = max(
        a1_table[nu].norm_u * nu.rho_power(rho.values) / rep.C_u for nu in a1_table.index_set
    )
    record(
        "A7",
        rho.admissible and not bad,
        f"{len(bad)} violations over {len(a1_table.index_set)} indices, C_u = {rep.C_u:.3f}, "
        f"max ||t|| rho^nu / C_u = {ratio:.3f}",
    )


def test_A8_level_sum_contraction(local_system):
    eps, theta = 0.3, 0.1
    table = compute_coefficients(local_system, IndexSet.simplex(8, 5))
    rho = construct_admissible_rho(local_system.kappa_meta, eps, local_system.quad_points)
    ls = weighted_l2_level_sums(table, rho, local_system, eps, theta)
    ratios = ", ".join(f"{s / ls.S[0]:.2g}" for s in ls.S[1:])
    record(
        "A8",
        rho.admissible and not ls.violations(SLACK) and ls.total_holds(SLACK),
        f"sigma = {ls.sigma:.3f}, S_k/S_0 = {ratios}; sum {sum(ls.S):.3g} vs cap {ls.geometric_total:.3g}",
    )


def test_A9_wellposedness_chain():
    parts, ok = [], True
    for n in (32, 64, 128):
        sys = build_mixed_diffusion_1d(n, constant_parametrization(1.0))
        c = discrete_poincare_constant(sys)
        b = estimate_infsup(sys)
        ok &= b >= 1 / np.sqrt(1 + c) - INFSUP_TOL
        parts.append(f"n={n}: beta {b:.5f}, floor {1 / np.sqrt(1 + c):.5f}")
    rel = abs(c - 1 / np.pi**2) * np.pi**2
    ok &= rel <= POINCARE_REL
    record("A9", bool(ok), "; ".join(parts) + f"; C_p(128) off 1/pi^2 by {rel:.2%}")


def test_A10_perturbation(a1_system):
    rep = well_posedness(a1_system)
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        y, yt = rng.uniform(-1, 1, (2, 4))
        r = perturbation_check(a1_system, y, yt, rep)
        worst = max(worst, r.lhs_u / r.rhs_bound_u)
    record("A10", worst <= 1 + SLACK, f"max measured/bound for u = {worst:.3f} over 20 pairs")


def _brute_envelope(theta):
    return {nu: max(v for mu, v in theta.items() if nu.precedes(mu)) for nu in theta}


def test_A11_envelope_oracle():
    rng = np.random.default_rng(11)
    mismatches = 0
    for k in range(100):
        dims, deg = 1 + k % 3, int(rng.integers(0, 5))
        lam = IndexSet.simplex(dims, deg)
        theta = {nu: float(v) for nu, v in zip(lam, rng.exponential(size=len(lam)))}
        mismatches += monotone_envelope(theta) != _brute_envelope(theta)
    record("A11", mismatches == 0, f"{mismatches} mismatches in 100 random sequences")


def test_A12_determinism(tmp_path):
    outs = []
    for tag in ("first", "second"):
        out = tmp_path / tag
        cfg = tmp_path / f"{tag}.cfg"
        cfg.write_text(rate_config(out))
        assert main(["run", str(cfg)]) == 0
        outs.append(out)
    same = {f: (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in ("coefficients.csv", "rates.csv")}
    record("A12", all(same.values()), ", ".join(f"{f} {'identical' if v else 'differs'}" for f, v in same.items()))
