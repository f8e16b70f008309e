"""Run configuration: strict JSON parsing and canonical serialization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

MODELS = ("oscillator1d", "radial", "sinh", "general")

PARAM_KEYS = {
    "oscillator1d": {"mu", "omega", "hbar", "beta", "gamma"},
    "radial": {"mu", "omega", "hbar", "beta", "beta_prime", "D", "L2", "gamma"},
    "sinh": {"a", "b", "g", "gamma_pot"},
    "general": {"g", "alpha", "beta_gen", "c", "domain"},
}
PARAM_DEFAULTS = {
    "oscillator1d": {"mu": 1.0, "omega": 1.0, "hbar": 1.0, "beta": 0.0, "gamma": 0.0},
    "radial": {"mu": 1.0, "omega": 1.0, "hbar": 1.0, "beta": 0.0, "beta_prime": 0.0,
               "D": 3, "L2": 0.0, "gamma": 0.0},
    "sinh": {"a": 1.0, "b": 0.0},
    "general": {"c": 1.0, "domain": [-4.0, 4.0]},
}


class ConfigError(ValueError):
    """Invalid configuration (reported with exit code 2)."""


@dataclass(frozen=True)
class OracleSettings:
    N: int = 4001
    tol: float = 1e-4
    x_max: Optional[float] = None
    continued: bool = False
    compare_to: str = "oracle"  # or "closed-form"


@dataclass(frozen=True)
class ScanSettings:
    param: str
    values: tuple


@dataclass(frozen=True)
class WavefunctionSettings:
    k: int = 0
    samples: int = 2001


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: dict
    k_max: int = 5
    oracle: OracleSettings = field(default_factory=OracleSettings)
    scan: Optional[ScanSettings] = None
    wavefunction: WavefunctionSettings = field(default_factory=WavefunctionSettings)
    reference: Optional[tuple] = None
    seed: int = 0
    out: Optional[str] = None

    def param(self, name):
        return self.params.get(name, PARAM_DEFAULTS[self.model].get(name))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = dict(self.params)
        if self.scan is not None:
            d["scan"]["values"] = list(self.scan.values)
        if self.reference is not None:
            d["reference"] = list(self.reference)
        return d

    def to_json(self) -> str:
        # json writes floats with repr, the shortest string that round-trips
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def _strict(obj: dict, allowed, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def _number(v, where, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number")
    if integer and int(v) != v:
        raise ConfigError(f"{where} must be an integer")
    if not math.isfinite(v):
        raise ConfigError(f"{where} must be finite")
    return int(v) if integer else v


def _sub(cls, raw, where):
    if raw is None:
        return cls()
    names = [f.name for f in fields(cls)]
    _strict(raw, names, where)
    return cls(**raw)


def from_dict(raw: dict) -> RunConfig:
    names = [f.name for f in fields(RunConfig)]
    _strict(raw, names, "config")
    model = raw.get("model")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {list(MODELS)}")
    params = raw.get("params", {})
    _strict(params, PARAM_KEYS[model], "params")
    for k, v in params.items():
        if model == "general" and k == "g":
            if not isinstance(v, str):
                raise ConfigError("params.g must name a registered function")
        elif model == "general" and k == "domain":
            if not (isinstance(v, list) and len(v) == 2):
                raise ConfigError("params.domain must be [lo, hi]")
            for x in v:
                _number(x, "params.domain")
        else:
            _number(v, f"params.{k}", integer=(k == "D"))
    k_max = _number(raw.get("k_max", 5), "k_max", integer=True)
    if k_max < 0:
        raise ConfigError("k_max must be >= 0")
    oracle = _sub(OracleSettings, raw.get("oracle"), "oracle")
    oracle = replace(oracle, N=_number(oracle.N, "oracle.N", integer=True),
                     tol=_number(oracle.tol, "oracle.tol"))
    if oracle.x_max is not None:
        _number(oracle.x_max, "oracle.x_max")
    if not isinstance(oracle.continued, bool):
        raise ConfigError("oracle.continued must be true or false")
    if oracle.compare_to not in ("oracle", "closed-form"):
        raise ConfigError("oracle.compare_to must be 'oracle' or 'closed-form'")
    scan = None
    if raw.get("scan") is not None:
        s = raw["scan"]
        _strict(s, ("param", "values"), "scan")
        if s.get("param") not in PARAM_KEYS[model]:
            raise ConfigError(f"scan.param must be one of {sorted(PARAM_KEYS[model])}")
        vals = s.get("values")
        if not isinstance(vals, list):
            raise ConfigError("scan.values must be a list")
        scan = ScanSettings(s["param"], tuple(_number(v, "scan.values") for v in vals))
    wf = _sub(WavefunctionSettings, raw.get("wavefunction"), "wavefunction")
    wf = replace(wf, k=_number(wf.k, "wavefunction.k", integer=True),
                 samples=_number(wf.samples, "wavefunction.samples", integer=True))
    if wf.samples < 16:
        raise ConfigError("wavefunction.samples must be >= 16")
    ref = raw.get("reference")
    if ref is not None:
        if not isinstance(ref, list):
            raise ConfigError("reference must be a list of numbers")
        ref = tuple(_number(v, "reference") for v in ref)
    seed = _number(raw.get("seed", 0), "seed", integer=True)
    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out must be a path string")
    return RunConfig(model, dict(params), k_max, oracle, scan, wf, ref, seed, out)


def loads(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return from_dict(raw)


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
