"""Scenario presets, Monte Carlo estimation, parameter sweeps and result emission."""
from __future__ import annotations

import copy
import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from scipy.stats import binomtest

from .groups import (
    GroupError, Shape, ZLattice, ball, cube, group_spec, axis_interior, generator_interior, make_group,
)
from .overlap import OverlapFamily, unique_labeling_certificate
from .patterns import ProbVector, critical_ratio, sample, trial_rng
from .reads import DEFAULT_ORACLE_BUDGET, Instance, oracle_identifiable
from .shells import certify_nonidentifiable

FAMILIES = ("ex1", "ex2", "ex3", "custom")
MODES = ("certificates", "oracle")
SWEEP_PARAMS = ("r", "R", "m", "ell", "alphabet_size")
CSV_TAIL = ["trials", "seed", "n_cert_id", "n_cert_nonid", "n_unknown",
            "p_id_lo", "p_id_hi", "lambda_ratio", "lambda_c", "wall_ms"]
PARAM_COLUMNS = {
    "ex1": ["d", "m", "r", "ell", "R"],
    "ex2": ["d", "n", "K"],
    "ex3": ["group", "R", "r"],
    "custom": ["group", "C", "K"],
}


class ConfigError(ValueError):
    pass


class CertificateConflict(RuntimeError):
    """Both certificates fired on one pattern; one of them is wrong."""


def _parse_weights(raw) -> ProbVector:
    # strings such as "1/3" stay exact; JSON floats switch to double mode
    return ProbVector(Fraction(x) if isinstance(x, str) else x for x in raw)


@dataclass
class ScenarioConfig:
    family: str
    params: dict
    alphabet_size: int = 2
    p: list | None = None
    trials: int = 100
    seed: int = 0
    mode: str = "certificates"
    fam_choice: object = "default"
    eps: float = 0.1
    budget: int = DEFAULT_ORACLE_BUDGET

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.trials < 0:
            raise ConfigError("trials must be nonnegative")
        if self.alphabet_size < 2:
            raise ConfigError("alphabet_size must be at least 2")
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if self.p is not None and len(self.p) != self.alphabet_size:
            raise ConfigError("p must have one weight per symbol")
        try:
            self.prob
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def prob(self) -> ProbVector:
        if self.p is None:
            return ProbVector.uniform(self.alphabet_size)
        return _parse_weights(self.p)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        required = {"family", "params"}
        missing = required - data.keys()
        if missing:
            raise ConfigError(f"config missing {sorted(missing)}")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config fields {sorted(extra)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        data.pop("sweep", None)
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": copy.deepcopy(self.params),
            "alphabet_size": self.alphabet_size,
            "p": None if self.p is None else list(self.p),
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode,
            "fam_choice": copy.deepcopy(self.fam_choice),
            "eps": self.eps,
            "budget": self.budget,
        }

    def replace(self, **changes) -> "ScenarioConfig":
        data = self.to_dict()
        data.update(changes)
        return ScenarioConfig.from_dict(data)

    def with_param(self, name: str, value) -> "ScenarioConfig":
        """Copy with one swept parameter changed; ex1 keeps ``R`` fixed when ``r`` or ``ell`` move."""
        if name not in SWEEP_PARAMS:
            raise ConfigError(f"cannot sweep {name!r}; expected one of {SWEEP_PARAMS}")
        if name == "alphabet_size":
            return self.replace(alphabet_size=int(value), p=None)
        params = copy.deepcopy(self.params)
        params[name] = value
        if self.family == "ex1":
            if name == "m":
                params.pop("R", None)
            elif name in ("r", "ell") and "R" in params:
                params.pop("m", None)
        return self.replace(params=params)


# -- instance construction ---------------------------------------------------

def _ex1(params):
    d = int(params.get("d", 1))
    ell = int(params.get("ell", 1))
    r = int(params["r"])
    if r <= ell:
        raise ConfigError(f"ex1 needs r > ell (got r={r}, ell={ell}); the overlap prisms would be empty")
    if "m" in params:
        m = int(params["m"])
    elif "R" in params:
        m = (int(params["R"]) - r) // ell
    else:
        raise ConfigError("ex1 needs m or R")
    if m < 0:
        raise ConfigError("ex1 needs R >= r")
    ctx = ZLattice(d)
    C = cube(d, 0, m * ell, ell)
    K = cube(d, 0, r - 1)
    prisms = []
    for i in range(d):
        shift = tuple(ell if j == i else 0 for j in range(d))
        prisms.append(K & Shape(tuple(a + b for a, b in zip(k, shift)) for k in K))
    return ctx, C, K, prisms, {"d": d, "m": m, "r": r, "ell": ell, "R": m * ell + r}


def _lattice_shape(d, desc):
    if isinstance(desc, dict):
        kind, size = desc.get("shape"), int(desc.get("size", 0))
        if size < 1:
            raise ConfigError("named read shape needs size >= 1")
        if kind == "cube":
            return cube(d, 0, size - 1)
        if kind == "diamond":
            box = cube(d, -size, size)
            return Shape(x for x in box if sum(abs(c) for c in x) <= size)
        raise ConfigError(f"unknown named shape {kind!r}")
    return ZLattice(d).shape(desc)


def _ex2(params):
    d = int(params.get("d", 1))
    n = int(params["n"])
    if n < 1:
        raise ConfigError("ex2 needs n >= 1")
    if "K" not in params:
        raise ConfigError("ex2 needs K (explicit list or {shape, size})")
    ctx = ZLattice(d)
    K = _lattice_shape(d, params["K"])
    fam = axis_interior(ctx, K)
    if not len(fam):
        raise ConfigError("ex2 read shape has an empty interior")
    return ctx, cube(d, 0, n - 1), K, [fam], {"d": d, "n": n, "K": params["K"]}


def _ex3(params):
    ctx = make_group(params["group"])
    R, r = int(params["R"]), int(params["r"])
    if not 1 <= r <= R:
        raise ConfigError("ex3 needs 1 <= r <= R")
    K = ball(ctx, r)
    fam = generator_interior(ctx, K)
    if not len(fam):
        raise ConfigError("ex3 read shape has an empty interior")
    return ctx, ball(ctx, R - r), K, [fam], {"group": group_spec(ctx), "R": R, "r": r}


def _custom(params):
    ctx = make_group(params["group"])
    C, K = ctx.shape(params["C"]), ctx.shape(params["K"])
    return ctx, C, K, [K], {"group": group_spec(ctx), "C": params["C"], "K": params["K"]}


_BUILDERS = {"ex1": _ex1, "ex2": _ex2, "ex3": _ex3, "custom": _custom}


def _choose_family(ctx, K, default, choice) -> OverlapFamily:
    if choice == "default":
        shapes = default
    elif choice == "K":
        shapes = [K]
    elif choice == "interior":
        shapes = [axis_interior(ctx, K) if isinstance(ctx, ZLattice) else generator_interior(ctx, K)]
    elif isinstance(choice, list):
        shapes = [ctx.shape(s) for s in choice]
    else:
        raise ConfigError(f"unknown fam_choice {choice!r}")
    try:
        fam = OverlapFamily(shapes)
        fam.validate(K)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return fam


@dataclass
class Scenario:
    inst: Instance
    family: OverlapFamily
    resolved: dict


def build_instance(cfg: ScenarioConfig) -> Scenario:
    try:
        ctx, C, K, default, resolved = _BUILDERS[cfg.family](cfg.params)
        inst = Instance(ctx, C, K, cfg.alphabet_size)
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc}") from None
    except (GroupError, ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    fam = _choose_family(ctx, K, default, cfg.fam_choice)
    if cfg.mode == "oracle" and cfg.alphabet_size ** len(inst.CK) > cfg.budget:
        raise ConfigError("oracle mode needs alphabet_size**|CK| within the budget")
    return Scenario(inst, fam, resolved)


# -- trials --------------------------------------------------------------------

IDENTIFIABLE, NON_IDENTIFIABLE, UNKNOWN = "identifiable", "non_identifiable", "unknown"


def run_trial(scn: Scenario, cfg: ScenarioConfig, trial: int, prob: ProbVector) -> str:
    w = sample(trial_rng(cfg.seed, trial), scn.inst.CK, prob)
    if cfg.mode == "oracle":
        verdict = oracle_identifiable(scn.inst, w, cfg.budget)
        return IDENTIFIABLE if verdict.identifiable else NON_IDENTIFIABLE
    pos = unique_labeling_certificate(scn.inst, scn.family, w)
    neg = certify_nonidentifiable(scn.inst, w)
    if pos.certified and neg.certified:
        raise CertificateConflict(
            f"trial {trial} (seed {cfg.seed}): both certificates fired; "
            f"pair {neg.pair.a}, {neg.pair.b}; pattern {w.as_string()}"
        )
    if pos.certified:
        return IDENTIFIABLE
    if neg.certified:
        return NON_IDENTIFIABLE
    return UNKNOWN


def wilson(successes: int, n: int) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(successes, n).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class EstimateResult:
    config: ScenarioConfig
    resolved: dict
    n_cert_id: int
    n_cert_nonid: int
    n_unknown: int
    lambda_ratio: float
    lambda_c: float
    wall_ms: float
    verdicts: list = field(default_factory=list, repr=False)

    @property
    def trials(self) -> int:
        return self.n_cert_id + self.n_cert_nonid + self.n_unknown

    @property
    def frac_id(self) -> float:
        return self.n_cert_id / self.trials if self.trials else math.nan

    @property
    def frac_nonid(self) -> float:
        return self.n_cert_nonid / self.trials if self.trials else math.nan

    @property
    def p_id_interval(self) -> tuple[float, float]:
        lo, _ = wilson(self.n_cert_id, self.trials)
        _, hi = wilson(self.n_cert_id + self.n_unknown, self.trials)
        return lo, hi

    def row(self) -> dict:
        lo, hi = self.p_id_interval
        out = {"family": self.config.family}
        for name in PARAM_COLUMNS[self.config.family]:
            value = self.resolved.get(name)
            out[name] = value if isinstance(value, (int, float)) else json.dumps(value, separators=(",", ":"))
        out["alphabet_size"] = self.config.alphabet_size
        out.update(
            trials=self.trials, seed=self.config.seed, n_cert_id=self.n_cert_id,
            n_cert_nonid=self.n_cert_nonid, n_unknown=self.n_unknown,
            p_id_lo=repr(lo), p_id_hi=repr(hi),
            lambda_ratio=repr(self.lambda_ratio), lambda_c=repr(self.lambda_c),
            wall_ms=round(self.wall_ms, 3),
        )
        return out


def run_trials(cfg: ScenarioConfig, threads: int = 1, scenario: Scenario | None = None) -> EstimateResult:
    """Estimate identifiability by sampling; deterministic for a given seed and any thread count."""
    start = time.perf_counter()
    scn = scenario or build_instance(cfg)
    prob = cfg.prob
    inst = scn.inst
    if cfg.trials and cfg.mode == "certificates":
        # warm the shared tables before workers start
        w0 = sample(trial_rng(cfg.seed, 0), inst.CK, prob)
        unique_labeling_certificate(inst, scn.family, w0)
        certify_nonidentifiable(inst, w0)
    work = range(cfg.trials)
    if threads > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            verdicts = list(pool.map(lambda t: run_trial(scn, cfg, t, prob), work))
    else:
        verdicts = [run_trial(scn, cfg, t, prob) for t in work]
    ck = len(inst.CK)
    return EstimateResult(
        config=cfg,
        resolved=scn.resolved,
        n_cert_id=verdicts.count(IDENTIFIABLE),
        n_cert_nonid=verdicts.count(NON_IDENTIFIABLE),
        n_unknown=verdicts.count(UNKNOWN),
        lambda_ratio=len(inst.K) / math.log(ck) if ck > 1 else math.nan,
        lambda_c=critical_ratio(prob),
        wall_ms=(time.perf_counter() - start) * 1000,
        verdicts=verdicts,
    )


def sweep(cfg: ScenarioConfig, parameter: str, values, threads: int = 1) -> list[EstimateResult]:
    if parameter not in SWEEP_PARAMS:
        raise ConfigError(f"cannot sweep {parameter!r}; expected one of {SWEEP_PARAMS}")
    return [run_trials(cfg.with_param(parameter, v), threads) for v in values]


# -- output ------------------------------------------------------------------------

def _columns(results) -> list[str]:
    cols = ["family"]
    for res in results:
        for name in PARAM_COLUMNS[res.config.family] + ["alphabet_size"]:
            if name not in cols:
                cols.append(name)
    return cols + CSV_TAIL


def to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_columns(results), lineterminator="\n")
    writer.writeheader()
    for res in results:
        writer.writerow(res.row())
    return buf.getvalue()


def to_json(results) -> str:
    results = list(results)
    doc = {
        "config": results[0].config.to_dict() if results else None,
        "rows": [dict(res.row(), config=res.config.to_dict()) for res in results],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(results, fmt: str = "csv", path=None) -> str:
    """Render results as CSV or JSON; write to ``path`` when given."""
    if isinstance(results, EstimateResult):
        results = [results]
    if fmt == "csv":
        text = to_csv(results)
    elif fmt == "json":
        text = to_json(results)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
