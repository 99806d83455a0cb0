"""Command line entry point: ``sparse-saddle run|constants|analyze``.

Exit status: 0 on success, 1 for configuration or usage errors, 2 when a
numerical check fails.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, problems, saddle, taylor
from ._backend import BACKEND
from .config import ConfigError, ExperimentConfig, load_config
from .multiindex import IndexSet, MultiIndex, monotone_envelope, stechkin_curve
from .svg import loglog_chart

KERNEL_TOL = 1e-9

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2


class CheckFailure(RuntimeError):
    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.name = name


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _g(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


# ---------------------------------------------------------------- run


def build_parametrization(cfg: ExperimentConfig):
    dim = 1 if cfg["problem.name"] == "diffusion1d" else 2
    J, k0, theta = cfg["param.J"], cfg["param.kappa0"], cfg["param.theta"]
    if J == 0:
        return problems.constant_parametrization(k0, dim=dim, theta=theta)
    if cfg["param.kind"] == "global":
        return problems.build_global_parametrization(J, cfg["param.sigma"], cfg["param.c"], k0, dim=dim, theta=theta)
    weights = cfg["param.weights"]
    if weights is None:
        scale, decay = cfg["param.weight_scale"], cfg.get("param.weight_decay", 0.0)
        weights = [scale * j ** (-decay) for j in range(1, J + 1)]
    return problems.build_local_parametrization(J, weights, k0, dim=dim, theta=theta)


def build_system(cfg: ExperimentConfig):
    param = build_parametrization(cfg)
    n = cfg["problem.resolution"]
    if cfg["problem.name"] == "diffusion1d":
        return problems.build_mixed_diffusion_1d(n, param, problems.ConstantField(cfg["problem.source"]))
    force = problems.ConstantVectorField(tuple(cfg["problem.force"]))
    if cfg["problem.force_shape"] == "parabolic":
        force = problems.CallableField(_parabolic(force))
    return problems.build_stokes_mac_2d(n, n, param, force)


def _parabolic(force):
    def profile(x):
        return force(x) * (4.0 * x[:, 1] * (1.0 - x[:, 1]))[:, None]

    return profile


def _write(path: Path, text: str) -> None:
    path.write_text(text, newline="")


def _stechkin_text(norms_u, norms_p, N_max, s) -> tuple[str, float, float]:
    lines = ["N,tail_u,bound_u,tail_p,bound_p"]
    N = list(range(1, N_max + 1))
    tu, bu = stechkin_curve(norms_u, s, [min(n, len(norms_u)) for n in N])
    tp, bp = stechkin_curve(norms_p, s, [min(n, len(norms_p)) for n in N])
    for row in zip(N, tu, bu, tp, bp):
        lines.append(",".join([str(row[0]), *(_g(v) for v in row[1:])]))
    return "\n".join(lines) + "\n", analysis.ls_norm(norms_u, s), analysis.ls_norm(norms_p, s)


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run one configured experiment and write its artifacts. Returns the summary record."""
    out = Path(cfg["output.directory"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        system = build_system(cfg)
    except problems.EllipticityError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    param = system.kappa_meta

    if cfg["run.mode"] == "fixed_set":
        lam = IndexSet.simplex(system.J, cfg["run.max_degree"])
        table = taylor.compute_coefficients(system, lam)
    else:
        lam, table = taylor.adaptive_construct(system, cfg["run.N_target"], cfg["run.weight_u"])
    explored = taylor.explored_indices(table)
    all_indices = list(lam.insertion_order) + explored

    _write(out / "coefficients.csv", table.to_csv())
    _write(out / "explored.csv", table.to_csv(explored))
    _write(out / "coefficient_vectors.txt", table.vectors_text())

    summary: dict = {
        "config_hash": cfg.config_hash,
        "seed": cfg["validation.seed"],
        "backend": BACKEND,
        "problem": cfg["problem.name"],
        "resolution": cfg["problem.resolution"],
        "param_kind": param.kind,
        "J": system.J,
        "kappa_min": param.kappa_min,
        "kappa_max": param.kappa_max,
        "theta": param.theta,
        "mode": cfg["run.mode"],
        "weight_u": cfg["run.weight_u"],
        "N": len(lam),
        "explored": len(explored),
    }
    checks: dict[str, bool] = {}

    residuals = taylor.kernel_residuals(table, system.B)
    worst = max(residuals.values(), default=0.0)
    summary["max_kernel_residual"] = worst
    checks["kernel_condition"] = worst <= KERNEL_TOL

    # rates: tails over every computed coefficient, N up to the selected count
    window = None
    if cfg["analysis.fit_lo"] is not None:
        window = (cfg["analysis.fit_lo"], cfg["analysis.fit_hi"])
    s_est = analysis.estimate_s(param.sup_norms)
    report = analysis.rate_report(
        table.norms_u(all_indices), table.norms_p(all_indices), len(lam), window, s_est
    )
    _write(out / "rates.csv", report.csv_text())
    summary.update(
        fitted_rate_u=report.fitted_rate_u,
        fitted_rate_p=report.fitted_rate_p,
        predicted_rate=report.predicted_rate,
        s_estimate=report.s_estimate,
        s_estimate_heuristic=True,
        fit_window_lo=report.fit_window[0],
        fit_window_hi=report.fit_window[1],
    )

    s = cfg["analysis.s"]
    if s is not None:
        text, lsu, lsp = _stechkin_text(table.norms_u(all_indices), table.norms_p(all_indices), len(lam), s)
        _write(out / "stechkin.csv", text)
        summary.update(s=s, ls_norm_u=lsu, ls_norm_p=lsp)

    if system.J > 0 and len(lam) > 1:
        ind = taylor.indicator_values(table, cfg["run.weight_u"], lam)
        env = monotone_envelope(ind)
        summary["envelope_violations"] = len(analysis.envelope_violations(ind, env))

    val = analysis.validate_sup_error(system, table, cfg["validation.samples"], cfg["validation.seed"], lam)
    _write(out / "validation.csv", val.csv_text())
    summary.update(sup_error_u=val.sup_error_u, sup_error_p=val.sup_error_p, sup_relative_u=val.sup_relative_u)

    eps = cfg["analysis.epsilon"]
    if eps is not None:
        wp = saddle.well_posedness(system)
        summary.update(
            alpha_h=wp.alpha_h, beta_h=wp.beta_h, gamma_h=wp.gamma_h, delta_h=wp.delta_h, C_u=wp.C_u, C_p=wp.C_p
        )
        try:
            rho = analysis.construct_admissible_rho(param, eps, system.quad_points)
        except analysis.NoAdmissibleRhoError as exc:
            raise CheckFailure("rho_admissible", str(exc)) from None
        summary["rho"] = " ".join(_g(r) for r in rho.values)
        checks["rho_admissible"] = rho.admissible
        if system.J > 0:
            viol = taylor.coefficient_bound_check(table, rho.values, wp.C_u, indices=lam)
            summary["coefficient_bound_violations"] = len(viol)
            checks["coefficient_bound"] = not viol

    if cfg["output.emit_svg"]:
        guide = report.predicted_rate if math.isfinite(report.predicted_rate) and report.predicted_rate > 0 else None
        svg = loglog_chart(
            [("tail u", report.N_values, report.tails_u), ("tail p", report.N_values, report.tails_p)],
            guide_rate=guide,
            title=f"best N-term tails, {cfg['problem.name']}, J = {system.J}",
        )
        _write(out / "convergence.svg", svg)

    for name, ok in checks.items():
        summary[f"check.{name}"] = "pass" if ok else "fail"
    _write(out / "summary.txt", "".join(f"{k} = {_g(v)}\n" for k, v in summary.items()))
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise CheckFailure(failed[0], f"see {out / 'summary.txt'}")
    return summary


# ---------------------------------------------------------------- analyze


def read_coefficients_csv(path) -> list[tuple[MultiIndex, float, float]]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != taylor.CSV_HEADER:
            raise ConfigError(f"{path}: expected header {','.join(taylor.CSV_HEADER)}")
        for rowno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ConfigError(f"{path}: row {rowno}: expected 4 fields, got {len(row)}")
            try:
                nu = MultiIndex.decode(row[0])
                nu_, np_ = float(row[2]), float(row[3])
            except ValueError as exc:
                raise ConfigError(f"{path}: row {rowno}: {exc}") from None
            if int(row[1]) != nu.degree:
                raise ConfigError(f"{path}: row {rowno}: total_degree {row[1]} does not match {row[0]!r}")
            rows.append((nu, nu_, np_))
    return rows


def analyze(paths, s, out_dir, window=None) -> dict:
    rows = read_coefficients_csv(paths[0])
    if not rows:
        raise ConfigError(f"{paths[0]}: no coefficient rows")
    N_max = len(rows)
    for extra in paths[1:]:
        rows += read_coefficients_csv(extra)
    norms_u = {nu: a for nu, a, _ in rows}
    norms_p = {nu: b for nu, _, b in rows}
    if len(norms_u) != len(rows):
        raise ConfigError("duplicate multi-indices across the input files")
    report = analysis.rate_report(norms_u, norms_p, N_max, window)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "rates.csv", report.csv_text())
    summary = {
        "inputs": " ".join(str(p) for p in paths),
        "N": N_max,
        "fitted_rate_u": report.fitted_rate_u,
        "fitted_rate_p": report.fitted_rate_p,
        "fit_window_lo": report.fit_window[0],
        "fit_window_hi": report.fit_window[1],
    }
    if s is not None:
        text, lsu, lsp = _stechkin_text(norms_u, norms_p, N_max, s)
        _write(out / "stechkin.csv", text)
        summary.update(s=s, ls_norm_u=lsu, ls_norm_p=lsp, predicted_rate=analysis.predicted_rate(s))
    _write(out / "analysis_summary.txt", "".join(f"{k} = {_g(v)}\n" for k, v in summary.items()))
    return summary


# ---------------------------------------------------------------- constants


def constants_table(args) -> list[tuple[str, float]]:
    need = {
        "stokes": ("kappa_min", "kappa_max", "gamma1", "gamma2", "C_p"),
        "diffusion": ("kappa_min", "kappa_max", "C_p"),
        "maxwell": ("kappa_min", "epsilon_max", "omega", "C_f"),
    }[args.problem]
    missing = [n for n in need if getattr(args, n) is None]
    if missing:
        raise ConfigError(
            f"--problem {args.problem} needs " + ", ".join("--" + m.replace("_", "-") for m in missing)
        )
    kw = {n: getattr(args, n) for n in need}
    if args.problem == "stokes":
        c = problems.stokes_constants(**kw)
    elif args.problem == "diffusion":
        c = problems.diffusion_constants(**kw)
    else:
        m = problems.maxwell_coercivity(**kw)
        return [("alpha", m.alpha), ("noncoercive", m.noncoercive)]
    return list(c._asdict().items())


# ---------------------------------------------------------------- main


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sparse-saddle", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a configured experiment")
    r.add_argument("config")

    c = sub.add_parser("constants", help="closed-form well-posedness constants")
    c.add_argument("--problem", choices=("stokes", "diffusion", "maxwell"), default="diffusion")
    for flag, dest in (
        ("--kappa-min", "kappa_min"),
        ("--kappa-max", "kappa_max"),
        ("--gamma1", "gamma1"),
        ("--gamma2", "gamma2"),
        ("--C-p", "C_p"),
        ("--epsilon-max", "epsilon_max"),
        ("--omega", "omega"),
        ("--C-f", "C_f"),
    ):
        c.add_argument(flag, dest=dest, type=float)

    a = sub.add_parser("analyze", help="best N-term tails and rates from coefficient CSV files")
    a.add_argument("csv", nargs="+", help="coefficients.csv, optionally followed by explored.csv")
    a.add_argument("--s", type=float, default=None, help="summability exponent in (0, 1) for Stechkin bounds")
    a.add_argument("--out", default=".", help="output directory")
    a.add_argument("--fit-lo", type=int, default=None)
    a.add_argument("--fit-hi", type=int, default=None)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            summary = run_experiment(cfg)
            print(f"wrote {cfg['output.directory']}: N = {summary['N']}, fitted_rate_u = {_g(summary['fitted_rate_u'])}")
        elif args.command == "constants":
            for k, v in constants_table(args):
                print(f"{k} = {_g(v)}")
        else:
            if args.s is not None and not 0.0 < args.s < 1.0:
                raise ConfigError(f"--s must lie in (0, 1), got {args.s}")
            if (args.fit_lo is None) != (args.fit_hi is None):
                raise ConfigError("give both --fit-lo and --fit-hi")
            window = None if args.fit_lo is None else (args.fit_lo, args.fit_hi)
            summary = analyze(args.csv, args.s, args.out, window)
            print(f"N = {summary['N']}, fitted_rate_u = {_g(summary['fitted_rate_u'])}")
    except (ConfigError, problems.EllipticityError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (saddle.DegenerateInfSupError, np.linalg.LinAlgError) as exc:
        print(f"check failed: well_posedness: {exc}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
