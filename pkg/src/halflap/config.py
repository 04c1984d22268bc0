"""Run configuration: one TOML file describing domain, model, lambda and solver.

Example::

    seed = 7
    modes = 64
    lambda = { factor = 2.0, of = "lambda_zero" }

    [domain]
    kind = "rectangle"
    lengths = ["pi", "pi"]

    [nonlinearity]
    name = "log-square"

    [beta]
    kind = "constant"
    value = 1.0

Lengths and the ball radius accept numbers or the strings ``"pi"``,
``"k*pi"`` and ``"pi/k"``.  ``lambda`` may instead be a ``[sweep]`` table
with ``min``, ``max``, ``count`` and ``scale`` (``linear`` or ``log``); the
bounds follow the same number-or-``{factor, of}`` rule.
"""

from __future__ import annotations

import copy
import math
import re
import sys
from dataclasses import dataclass, field, fields

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .domain import Domain, build_basis, build_quadrature, sufficient_points
from .energy import EnergyModel, Weight
from .errors import ConfigError
from .nonlinearity import builtin
from .solvers import SolverConfig

LAMBDA_REFERENCES = ("lambda_zero", "lambda_nonexist")
_TOP_KEYS = {"seed", "modes", "quad_points", "lambda", "domain", "nonlinearity", "beta", "solver", "sweep",
             "out", "random_trials"}
_PI = re.compile(r"^\s*(?:(?P<k>[0-9.eE+-]+)\s*\*\s*)?pi\s*(?:/\s*(?P<d>[0-9.eE+-]+))?\s*$")


def parse_length(value) -> float:
    """A positive number, or ``"pi"``, ``"k*pi"``, ``"pi/k"``."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a length, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _PI.match(value)
        if m:
            try:
                k = float(m["k"]) if m["k"] else 1.0
                d = float(m["d"]) if m["d"] else 1.0
            except ValueError as exc:
                raise ConfigError(f"bad length {value!r}") from exc
            return k * math.pi / d
    raise ConfigError(f"bad length {value!r}; use a number, 'pi', 'k*pi' or 'pi/k'")


@dataclass(frozen=True)
class LambdaSpec:
    """A fixed value or ``factor * reference`` with reference a computed threshold."""

    value: float | None = None
    factor: float | None = None
    of: str | None = None

    @classmethod
    def parse(cls, raw, where="lambda"):
        if isinstance(raw, bool):
            raise ConfigError(f"{where}: expected a number or a {{factor, of}} table")
        if isinstance(raw, (int, float)):
            if not raw >= 0:
                raise ConfigError(f"{where} must be non-negative, got {raw!r}")
            return cls(value=float(raw))
        if isinstance(raw, dict):
            extra = set(raw) - {"factor", "of"}
            if extra or "factor" not in raw or "of" not in raw:
                raise ConfigError(f"{where}: a relative lambda needs exactly 'factor' and 'of'")
            if raw["of"] not in LAMBDA_REFERENCES:
                raise ConfigError(f"{where}.of must be one of {LAMBDA_REFERENCES}, got {raw['of']!r}")
            factor = raw["factor"]
            if isinstance(factor, bool) or not isinstance(factor, (int, float)) or not factor >= 0:
                raise ConfigError(f"{where}.factor must be a non-negative number")
            return cls(factor=float(factor), of=raw["of"])
        raise ConfigError(f"{where}: expected a number or a {{factor, of}} table, got {raw!r}")

    def resolve(self, references: dict) -> float:
        if self.value is not None:
            return self.value
        return self.factor * references[self.of]

    def describe(self):
        if self.value is not None:
            return self.value
        return {"factor": self.factor, "of": self.of}


@dataclass(frozen=True)
class SweepSpec:
    lo: LambdaSpec
    hi: LambdaSpec
    count: int
    scale: str = "linear"

    @classmethod
    def parse(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("sweep must be a table")
        extra = set(raw) - {"min", "max", "count", "scale"}
        if extra:
            raise ConfigError(f"unknown sweep keys {sorted(extra)}")
        for key in ("min", "max", "count"):
            if key not in raw:
                raise ConfigError(f"sweep.{key} is required")
        count = raw["count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ConfigError(f"sweep.count must be an integer >= 1, got {count!r}")
        scale = raw.get("scale", "linear")
        if scale not in ("linear", "log"):
            raise ConfigError(f"sweep.scale must be 'linear' or 'log', got {scale!r}")
        return cls(LambdaSpec.parse(raw["min"], "sweep.min"), LambdaSpec.parse(raw["max"], "sweep.max"),
                   count, scale)

    def values(self, references: dict) -> np.ndarray:
        lo, hi = self.lo.resolve(references), self.hi.resolve(references)
        if hi < lo:
            raise ConfigError(f"empty sweep range: min {lo} > max {hi}")
        if self.count > 1 and hi == lo:
            raise ConfigError("empty sweep range: min == max with count > 1")
        if self.scale == "log":
            if not lo > 0:
                raise ConfigError("a log sweep needs min > 0")
            return np.geomspace(lo, hi, self.count)
        return np.linspace(lo, hi, self.count)

    def describe(self):
        return {"min": self.lo.describe(), "max": self.hi.describe(), "count": self.count, "scale": self.scale}


@dataclass(frozen=True)
class RunConfig:
    domain: Domain
    modes: int | None
    quad_points: int | None
    nonlinearity: dict
    beta: dict
    lam: LambdaSpec | None
    sweep: SweepSpec | None
    solver: SolverConfig
    seed: int = 0
    out: str | None = None
    random_trials: int = 500
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def with_seed(self, seed: int) -> "RunConfig":
        data = copy.deepcopy(self.raw)
        data["seed"] = int(seed)
        return from_dict(data)

    def build_nonlinearity(self):
        params = {k: v for k, v in self.nonlinearity.items() if k != "name"}
        try:
            return builtin(self.nonlinearity["name"], params)
        except (ValueError, OSError) as exc:
            raise ConfigError(f"nonlinearity: {exc}") from exc

    def build_basis(self):
        if not self.domain.has_basis:
            raise ConfigError(f"a {self.domain.kind} has no spectral basis; only thresholds are available")
        if self.modes is None:
            raise ConfigError("'modes' is required to build a model")
        return build_basis(self.domain, self.modes)

    def build_grid(self, basis=None):
        basis = basis or self.build_basis()
        return build_quadrature(self.domain, self.quad_points or sufficient_points(basis))

    def build_weight(self, grid=None):
        kind = self.beta.get("kind", "constant")
        if kind == "constant":
            return Weight.constant(self.beta.get("value", 1.0))
        if grid is None:
            grid = self.build_grid()
        try:
            return Weight.from_table(self.beta["path"], grid)
        except (OSError, ValueError, IndexError) as exc:
            raise ConfigError(f"beta table {self.beta['path']!r}: {exc}") from exc

    def build_model(self, lam: float = 0.0, nonlinearity=None) -> EnergyModel:
        basis = self.build_basis()
        grid = self.build_grid(basis)
        return EnergyModel(basis, grid, self.build_weight(grid), nonlinearity or self.build_nonlinearity(), lam)

    def describe(self) -> dict:
        out = {"domain": self.domain.describe(), "modes": self.modes, "quad_points": self.quad_points,
               "nonlinearity": dict(self.nonlinearity), "beta": dict(self.beta), "seed": self.seed,
               "solver": self.solver.describe(), "random_trials": self.random_trials}
        if self.lam is not None:
            out["lambda"] = self.lam.describe()
        if self.sweep is not None:
            out["sweep"] = self.sweep.describe()
        return out


def _domain(raw) -> Domain:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("[domain] needs a 'kind'")
    kind = raw["kind"]
    try:
        if kind == "interval":
            lengths = raw.get("lengths", raw.get("length"))
            if isinstance(lengths, list):
                if len(lengths) != 1:
                    raise ConfigError("an interval takes one length")
                lengths = lengths[0]
            return Domain.interval(parse_length(lengths))
        if kind == "rectangle":
            lengths = raw.get("lengths")
            if not isinstance(lengths, list) or len(lengths) != 2:
                raise ConfigError("a rectangle needs 'lengths' with two entries")
            return Domain.rectangle(*(parse_length(v) for v in lengths))
        if kind == "ball":
            dim = raw.get("dim")
            if isinstance(dim, bool) or not isinstance(dim, int):
                raise ConfigError("a ball needs an integer 'dim'")
            return Domain.ball(dim, parse_length(raw.get("radius")))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"domain: {exc}") from exc
    raise ConfigError(f"unknown domain kind {kind!r}")


def _solver(raw, seed) -> SolverConfig:
    if not isinstance(raw, dict):
        raise ConfigError("[solver] must be a table")
    names = {f.name for f in fields(SolverConfig)}
    extra = set(raw) - names
    if extra:
        raise ConfigError(f"unknown solver keys {sorted(extra)}")
    try:
        return SolverConfig(**{**raw, "seed": seed})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solver: {exc}") from exc


def _positive_int(raw, key, required=False):
    v = raw.get(key)
    if v is None:
        if required:
            raise ConfigError(f"'{key}' is required")
        return None
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ConfigError(f"'{key}' must be a positive integer, got {v!r}")
    return v


def from_dict(data: dict) -> RunConfig:
    """Validate a parsed configuration table."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a table")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ConfigError(f"unknown top-level keys {sorted(extra)}")
    if "domain" not in data:
        raise ConfigError("[domain] is required")
    domain = _domain(data["domain"])
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    nl = data.get("nonlinearity", {"name": "log-square"})
    if not isinstance(nl, dict) or "name" not in nl:
        raise ConfigError("[nonlinearity] needs a 'name'")
    beta = data.get("beta", {"kind": "constant", "value": 1.0})
    if not isinstance(beta, dict):
        raise ConfigError("[beta] must be a table")
    kind = beta.get("kind", "constant")
    if kind == "constant":
        v = beta.get("value", 1.0)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError("beta.value must be a positive number")
    elif kind == "table":
        if not isinstance(beta.get("path"), str):
            raise ConfigError("a table beta needs a 'path'")
    else:
        raise ConfigError(f"beta.kind must be 'constant' or 'table', got {kind!r}")
    lam = LambdaSpec.parse(data["lambda"]) if "lambda" in data else None
    sweep = SweepSpec.parse(data["sweep"]) if "sweep" in data else None
    trials = _positive_int(data, "random_trials") or 500
    out = data.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("'out' must be a path string")
    return RunConfig(domain, _positive_int(data, "modes"), _positive_int(data, "quad_points"), dict(nl),
                     dict(beta), lam, sweep, _solver(data.get("solver", {}), seed), seed, out, trials,
                     copy.deepcopy(data))


def loads(text: str) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML parse error: {exc}") from exc
    return from_dict(data)


def load(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from exc
    return from_dict(data)
