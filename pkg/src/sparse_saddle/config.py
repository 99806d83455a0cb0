"""Flat experiment configuration: ``dotted.key = value`` per line, ``#`` comments."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .saddle import DEFAULT_SEED


class ConfigError(ValueError):
    """A configuration problem, located by line and key when possible."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(key)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


def _int(text):
    return int(text)


def _float(text):
    return float(text)


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _str(text):
    return text.strip()


# key -> (parser, default)
SCHEMA = {
    "problem.name": (_str, None),
    "problem.resolution": (_int, None),
    "problem.source": (_float, 1.0),
    "problem.force": (_floats, (1.0, 0.0)),
    "problem.force_shape": (_str, "constant"),
    "param.kind": (_str, "global"),
    "param.J": (_int, 0),
    "param.sigma": (_float, 2.0),
    "param.c": (_float, 0.3),
    "param.kappa0": (_float, 1.0),
    "param.theta": (_float, None),
    "param.weights": (_floats, None),
    "param.weight_scale": (_float, None),
    "param.weight_decay": (_float, None),
    "run.mode": (_str, "fixed_set"),
    "run.max_degree": (_int, None),
    "run.N_target": (_int, None),
    "run.weight_u": (_float, 0.5),
    "validation.samples": (_int, 20),
    "validation.seed": (_int, DEFAULT_SEED),
    "analysis.epsilon": (_float, None),
    "analysis.fit_lo": (_int, None),
    "analysis.fit_hi": (_int, None),
    "analysis.s": (_float, None),
    "output.directory": (_str, "out"),
    "output.emit_svg": (_bool, False),
}

DEFAULT_RESOLUTION = {"diffusion1d": 64, "stokes2d": 16}
# a constant force is a pure pressure gradient on the channel (zero velocity);
# the parabolic profile scales it by 4 x2 (1 - x2)
FORCE_SHAPES = ("constant", "parabolic")


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict
    config_hash: str
    source_path: str = ""
    lines: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v


def parse_config_text(text: str, source_path: str = "") -> ExperimentConfig:
    values = {k: d for k, (_, d) in SCHEMA.items()}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in SCHEMA:
            raise ConfigError("unknown key", lineno, key)
        if key in lines:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", lineno, key)
        if not val:
            raise ConfigError("empty value", lineno, key)
        try:
            values[key] = SCHEMA[key][0](val)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {val!r}: {exc}", lineno, key) from None
        lines[key] = lineno
    digest = hashlib.sha256(text.encode()).hexdigest()
    cfg = ExperimentConfig(values, digest, source_path, lines)
    _validate(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc.strerror}") from None
    return parse_config_text(text, str(p))


def _validate(cfg: ExperimentConfig) -> None:
    v, ln = cfg.values, cfg.lines

    def fail(key, msg):
        raise ConfigError(msg, ln.get(key), key)

    name = v["problem.name"]
    if name is None:
        fail("problem.name", "required (diffusion1d or stokes2d)")
    if name not in DEFAULT_RESOLUTION:
        fail("problem.name", f"must be diffusion1d or stokes2d, got {name!r}")
    if v["problem.resolution"] is None:
        v["problem.resolution"] = DEFAULT_RESOLUTION[name]
    if v["problem.resolution"] < 4:
        fail("problem.resolution", "must be at least 4")
    if len(v["problem.force"]) != 2:
        fail("problem.force", "needs two comma-separated components")
    if v["problem.force_shape"] not in FORCE_SHAPES:
        fail("problem.force_shape", f"must be one of {', '.join(FORCE_SHAPES)}, got {v['problem.force_shape']!r}")
    if v["param.kind"] not in ("global", "local"):
        fail("param.kind", f"must be global or local, got {v['param.kind']!r}")
    if v["param.J"] < 0:
        fail("param.J", "must be nonnegative")
    if v["param.kappa0"] <= 0:
        fail("param.kappa0", "must be positive")
    if v["param.kind"] == "global":
        if v["param.sigma"] <= 1:
            fail("param.sigma", "must exceed 1")
        if v["param.c"] <= 0:
            fail("param.c", "must be positive")
    else:
        if v["param.weights"] is not None:
            if v["param.weight_scale"] is not None or v["param.weight_decay"] is not None:
                fail("param.weights", "give either weights or weight_scale/weight_decay, not both")
            if len(v["param.weights"]) != v["param.J"]:
                fail("param.weights", f"has {len(v['param.weights'])} entries, param.J = {v['param.J']}")
        elif v["param.J"] > 0 and v["param.weight_scale"] is None:
            fail("param.weights", "local parametrization needs weights or weight_scale")
    theta = v["param.theta"]
    if theta is not None and theta <= 0:
        fail("param.theta", "must be positive")
    mode = v["run.mode"]
    if mode not in ("fixed_set", "adaptive"):
        fail("run.mode", f"must be fixed_set or adaptive, got {mode!r}")
    if mode == "fixed_set":
        if v["run.max_degree"] is None:
            fail("run.max_degree", "required for fixed_set mode")
        if v["run.max_degree"] < 0:
            fail("run.max_degree", "must be nonnegative")
    else:
        if v["run.N_target"] is None:
            fail("run.N_target", "required for adaptive mode")
        if v["run.N_target"] < 1:
            fail("run.N_target", "must be at least 1")
    if not 0.0 <= v["run.weight_u"] <= 1.0:
        fail("run.weight_u", "must lie in [0, 1]")
    if v["validation.samples"] < 1:
        fail("validation.samples", "must be at least 1")
    s = v["analysis.s"]
    if s is not None and not 0.0 < s < 1.0:
        fail("analysis.s", "must lie in (0, 1)")
    lo, hi = v["analysis.fit_lo"], v["analysis.fit_hi"]
    if (lo is None) != (hi is None):
        fail("analysis.fit_lo" if lo is None else "analysis.fit_hi", "give both fit_lo and fit_hi")
    if lo is not None and not 1 <= lo < hi:
        fail("analysis.fit_lo", "need 1 <= fit_lo < fit_hi")
    eps = v["analysis.epsilon"]
    if eps is not None and eps <= 0:
        fail("analysis.epsilon", "must be positive")
