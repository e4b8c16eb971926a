"""Scenario configuration files.

One scenario per file, INI syntax::

    [scenario]
    kind = proof-chain
    seed = 0

    [params]
    lam = 1.0
    omega = 1.0
    deltas = 0.1, 0.25
    ps = 1.5, 2

    [output]
    dir = out
    format = json
    plot = tau,p_part.slack

Keys are checked against the schema of the scenario kind; unknown keys and
out-of-range values are rejected before anything runs.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from typing import Any, Callable

from periodbound.errors import PeriodBoundError

KINDS = ("bound", "sweep", "orbit", "proof-chain", "lv", "rd", "nse-estimate")


class ConfigError(PeriodBoundError, ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key, self.line = key, line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


def _float(s: str) -> float:
    return float(s)


def _floats(s: str) -> list[float]:
    return [float(x) for x in re.split(r"[,\s]+", s.strip()) if x]


def _int(s: str) -> int:
    return int(s)


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _str(s: str) -> str:
    return s.strip()


Check = Callable[[Any], str | None]


def _each(pred: Callable[[float], bool], msg: str, allow_empty: bool = False) -> Check:
    def check(v: Any) -> str | None:
        vals = v if isinstance(v, list) else [v]
        if not vals and not allow_empty:
            return "must not be empty"
        return None if all(pred(x) for x in vals) else msg
    return check


_pos = _each(lambda x: x > 0, "must be positive")
_nonneg = _each(lambda x: x >= 0, "must be nonnegative")
_alpha = _each(lambda x: 0 <= x < 1, "alpha must lie in [0, 1)")
_delta = _each(lambda x: 0 < x < 0.5, "delta must lie in (0, 1/2)")
_p = _each(lambda x: x > 1, "p must exceed 1")
_frac = _each(lambda x: 0 < x < 1, "tau fraction must lie in (0, 1)")
_gt1 = _each(lambda x: x > 1, "must exceed 1")
_none: Check = lambda v: None


def _scheme(v: str) -> str | None:
    from periodbound.evolution import SCHEMES

    return None if v in SCHEMES else f"scheme must be one of {', '.join(SCHEMES)}"


def _lv_dim(v: int) -> str | None:
    return None if v in (1, 2, 3) else "N must be 1, 2 or 3"


# name -> (parser, default, check)
SCHEMAS: dict[str, dict[str, tuple[Callable[[str], Any], Any, Check]]] = {
    "bound": {
        "alpha": (_floats, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9], _alpha),
        "optimize": (_bool, False, _none),
        "delta": (_float, None, _delta),
        "p": (_float, None, _p),
        "lipschitz": (_float, None, _pos),
    },
    "sweep": {
        "lams": (_floats, [0.5, 1.0, 2.0, 4.0, 8.0], _pos),
        "omegas": (_floats, [0.5, 1.0, 2.0, 4.0], _pos),
        "alphas": (_floats, [0.0, 0.25, 0.5, 0.75, 0.9], _alpha),
        "radius": (_float, 1.0, _pos),
        "remeasure": (_int, 0, _nonneg),
        "samples_per_period": (_int, 1024, _pos),
    },
    "orbit": {
        "lam": (_float, 1.0, _pos),
        "omega": (_float, 1.0, _pos),
        "alpha": (_float, 0.0, _alpha),
        "radius": (_float, 1.0, _pos),
        "inert": (_floats, [], _each(lambda x: x >= 0, "must be nonnegative", allow_empty=True)),
        "transient": (_float, 0.0, _nonneg),
        "samples_per_period": (_int, 1024, _pos),
        "scheme": (_str, "lawson-rk4", _scheme),
        "refine": (_bool, True, _none),
        "perturb": (_float, 1e-2, _nonneg),
        "trajectory": (_bool, False, _none),
    },
    "proof-chain": {
        "lam": (_float, 1.0, _pos),
        "omega": (_float, 1.0, _pos),
        "alpha": (_float, 0.0, _alpha),
        "radius": (_float, 1.0, _pos),
        "taus": (_floats, [0.25, 0.5, 0.8], _frac),
        "deltas": (_floats, [0.1, 0.25, 0.4], _delta),
        "ps": (_floats, [1.1, 1.5, 1.9], _p),
        "samples_per_period": (_int, 1024, _pos),
        "scheme": (_str, "lawson-rk4", _scheme),
    },
    "lv": {
        "lam": (_float, 1.0, _nonneg),
        "mu": (_float, 1.0, _nonneg),
        "a": (_float, 1.0, _nonneg),
        "b": (_float, 1.0, _nonneg),
        "c": (_float, 1.0, _nonneg),
        "d": (_float, 1.0, _nonneg),
        "C_alpha": (_float, 1.0, _pos),
        "R": (_floats, [1.0], _nonneg),
        "N": (_int, 1, _lv_dim),
        "M": (_float, None, _nonneg),
        "constant": (_float, 1.0, _pos),
    },
    "rd": {
        "n": (_int, 2, _pos),
        "p": (_floats, [2.0], _gt1),
        "q": (_floats, [1.5], _gt1),
    },
    "nse-estimate": {
        "N": (_int, 32, _each(lambda x: x >= 8, "N must be at least 8")),
        "G": (_floats, [2.0, 8.0, 32.0, 128.0], _gt1),
        "pairs": (_int, 50, _each(lambda x: x >= 10, "need at least 10 pairs")),
        "constant": (_float, None, _pos),
        "stability_factor": (_float, 4.0, _gt1),
    },
}

OUTPUT_KEYS = {"dir": (_str, None), "format": (_str, "json"), "plot": (_str, None)}


@dataclass
class ScenarioConfig:
    kind: str
    params: dict[str, Any]
    seed: int = 0
    out_dir: str | None = None
    format: str = "json"
    plot: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "seed": self.seed}


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return n
    return None


def default_config(kind: str, **overrides: Any) -> ScenarioConfig:
    if kind not in SCHEMAS:
        raise ConfigError(f"unknown scenario kind {kind!r}; choose from {', '.join(KINDS)}", key="kind")
    params = {k: v[1] for k, v in SCHEMAS[kind].items()}
    for k, v in overrides.items():
        if k not in params:
            raise ConfigError(f"unknown parameter for kind {kind!r}", key=k)
        params[k] = v
    cfg = ScenarioConfig(kind, params)
    validate(cfg)
    return cfg


def validate(cfg: ScenarioConfig, text: str | None = None) -> None:
    schema = SCHEMAS[cfg.kind]
    for key, value in cfg.params.items():
        if value is None:
            continue
        msg = schema[key][2](value)
        if msg:
            line = _line_of(text, "params", key) if text else None
            raise ConfigError(msg, key=f"params.{key}", line=line)
    p = cfg.params
    if cfg.kind == "bound" and (p.get("delta") is None) != (p.get("p") is None):
        raise ConfigError("delta and p must be given together", key="params.delta")
    if cfg.kind == "proof-chain":
        if p["samples_per_period"] < 256:
            raise ConfigError("need at least 256 samples per period", key="params.samples_per_period",
                              line=_line_of(text, "params", "samples_per_period") if text else None)
        bad = [x for x in p["ps"] if p["alpha"] * x >= 1]
        if bad:
            raise ConfigError(f"alpha*p must be < 1 (offending p: {bad})", key="params.ps",
                              line=_line_of(text, "params", "ps") if text else None)
    if cfg.format not in ("json", "csv"):
        raise ConfigError("format must be json or csv", key="output.format")


def parse_config(text: str) -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"cannot parse config: {exc.message if hasattr(exc, 'message') else exc}",
                          line=line) from exc
    for section in cp.sections():
        if section not in ("scenario", "params", "output"):
            raise ConfigError(f"unknown section [{section}]", line=_section_line(text, section))
    if not cp.has_option("scenario", "kind"):
        raise ConfigError("missing [scenario] kind", key="scenario.kind")
    kind = cp.get("scenario", "kind").strip()
    if kind not in SCHEMAS:
        raise ConfigError(f"unknown scenario kind {kind!r}; choose from {', '.join(KINDS)}",
                          key="scenario.kind", line=_line_of(text, "scenario", "kind"))
    extra = set(cp.options("scenario")) - {"kind", "seed"}
    if extra:
        k = sorted(extra)[0]
        raise ConfigError("unknown key", key=f"scenario.{k}", line=_line_of(text, "scenario", k))
    seed = 0
    if cp.has_option("scenario", "seed"):
        try:
            seed = int(cp.get("scenario", "seed"))
            if seed < 0:
                raise ValueError
        except ValueError:
            raise ConfigError("seed must be an unsigned integer", key="scenario.seed",
                              line=_line_of(text, "scenario", "seed")) from None

    schema = SCHEMAS[kind]
    params = {k: v[1] for k, v in schema.items()}
    if cp.has_section("params"):
        for key in cp.options("params"):
            line = _line_of(text, "params", key)
            if key not in schema:
                raise ConfigError(f"unknown key for kind {kind!r}", key=f"params.{key}", line=line)
            raw = cp.get("params", key)
            try:
                params[key] = schema[key][0](raw)
            except ValueError as exc:
                raise ConfigError(f"invalid value {raw!r}: {exc}", key=f"params.{key}", line=line) from None

    out = {k: v[1] for k, v in OUTPUT_KEYS.items()}
    if cp.has_section("output"):
        for key in cp.options("output"):
            if key not in OUTPUT_KEYS:
                raise ConfigError("unknown key", key=f"output.{key}", line=_line_of(text, "output", key))
            out[key] = OUTPUT_KEYS[key][0](cp.get("output", key))
    cfg = ScenarioConfig(
        kind=kind,
        params=params,
        seed=seed,
        out_dir=out["dir"],
        format=out["format"],
        plot=[s.strip() for s in out["plot"].split(",")] if out["plot"] else [],
    )
    validate(cfg, text)
    return cfg


def _section_line(text: str, section: str) -> int | None:
    for n, raw in enumerate(text.splitlines(), start=1):
        if raw.strip() == f"[{section}]":
            return n
    return None


def load_config(path: str) -> ScenarioConfig:
    with open(path) as fh:
        return parse_config(fh.read())
