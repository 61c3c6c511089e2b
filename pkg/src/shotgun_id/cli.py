"""Command-line entry point."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .groups import FreeGroup, GroupError, make_group
from .overlap import check_recovery_conditions, identifiability_lower_bound, unique_labeling_certificate
from .patterns import Pattern, collision_prob
from .probability import (
    disjoint_repeat_prob, exact_repeat_prob, exceptional_upper_bound, orbit_decomposition,
    repeat_prob_bounds,
)
from .reads import BudgetExceeded, Instance, oracle_identifiable
from .shells import (
    certify_nonidentifiable, check_blocking_conditions, default_blocking_set, dsc_greedy, repeated_shell_lower_bound,
    shell_type_index,
)
from .simulate import (
    CertificateConflict, ConfigError, ScenarioConfig, _parse_weights, build_instance, emit,
    run_trials, sweep,
)

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_CONFLICT = 0, 2, 3, 4

PRESETS = {
    "ex1": {"d": 1, "ell": 1, "R": 5000, "r": 35},
    "ex2": {"d": 2, "n": 24, "K": {"shape": "cube", "size": 5}},
    "ex3": {"group": {"kind": "free", "rank": 2}, "R": 5, "r": 2},
}


def _num(x):
    if isinstance(x, Fraction):
        return {"exact": str(x), "float": float(x)}
    return x


def _print(doc):
    print(json.dumps(doc, indent=2, default=str))


def _parse_element(ctx, text: str):
    text = text.strip()
    if isinstance(ctx, FreeGroup):
        return ctx.canonical(text)
    parts = text.replace(",", " ").split()
    try:
        nums = [int(x) for x in parts]
    except ValueError:
        raise ConfigError(f"bad coordinates {text!r}") from None
    return ctx.canonical(nums)


def read_pattern_file(path, inst: Instance) -> tuple[int, Pattern]:
    """First line: alphabet size; then ``coords : symbol`` per cell of CK."""
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read pattern file: {exc}") from None
    if not lines:
        raise ConfigError("pattern file is empty")
    try:
        q = int(lines[0])
        values = {}
        for ln in lines[1:]:
            coords, _, sym = ln.rpartition(":")
            values[_parse_element(inst.ctx, coords)] = int(sym)
    except (ValueError, GroupError) as exc:
        raise ConfigError(f"bad pattern file: {exc}") from None
    if set(values) != set(inst.CK):
        raise ConfigError(f"pattern covers {len(values)} cells; CK has {len(inst.CK)}")
    w = Pattern.from_mapping(inst.CK, values)
    try:
        w.check_alphabet(q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return q, w


def _scenario_with_pattern(args):
    cfg = ScenarioConfig.load(args.config)
    scn = build_instance(cfg)
    inst = scn.inst
    q, w = read_pattern_file(args.pattern, inst)
    if q != inst.alphabet_size:
        inst = Instance(inst.ctx, inst.C, inst.K, q)
    return cfg, scn.family, inst, w


def cmd_certify(args):
    _, fam, inst, w = _scenario_with_pattern(args)
    pos = unique_labeling_certificate(inst, fam, w)
    neg = certify_nonidentifiable(inst, w)
    doc = {
        "unique_labeling": {"certified": pos.certified, "reason": pos.reason},
        "repeated_shell": {"certified": neg.certified, "reason": neg.reason},
    }
    if neg.certified:
        doc["repeated_shell"]["pair"] = [list(neg.pair.a), list(neg.pair.b)]
    if pos.certified and neg.certified:
        _print(doc)
        raise CertificateConflict("both certificates fired")
    doc["verdict"] = "identifiable" if pos.certified else "non_identifiable" if neg.certified else "unknown"
    _print(doc)


def cmd_oracle(args):
    cfg, _, inst, w = _scenario_with_pattern(args)
    verdict = oracle_identifiable(inst, w, cfg.budget)
    doc = {"identifiable": verdict.identifiable, "preimage_size": verdict.preimage_size}
    if verdict.witness is not None:
        doc["witness"] = verdict.witness.as_string()
    _print(doc)


def cmd_exact_repeat(args):
    try:
        with open(args.config) as fh:
            data = json.load(fh)
        ctx = make_group(data["group"])
        A = ctx.shape(data["A"])
        p = _parse_weights(data["p"])
        if "translates" in data:
            gs = [ctx.canonical(g) for g in data["translates"]]
            _print({"disjoint_repeat_prob": _num(disjoint_repeat_prob(ctx, A, gs, p))})
            return
        g = ctx.canonical(data["g"])
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad exact-repeat config: {exc}") from None
    dec = orbit_decomposition(ctx, A, g)
    doc = {
        "orbit_sizes": dec.sizes(),
        "exact_repeat_prob": _num(exact_repeat_prob(ctx, A, g, p)),
    }
    if g != ctx.identity:
        lo, hi = repeat_prob_bounds(ctx, A, g, p)
        doc["bounds"] = [_num(lo), hi]
    _print(doc)


def cmd_bounds(args):
    cfg = _overridden(args)
    scn = build_instance(cfg)
    inst, p = scn.inst, cfg.prob
    B = default_blocking_set(inst)
    D = dsc_greedy(inst, B)
    doc = {
        "CK": len(inst.CK), "K": len(inst.K), "C": len(inst.C),
        "pi2": _num(collision_prob(p, 2)),
        "recovery_conditions": vars(check_recovery_conditions(inst, scn.family, p, cfg.eps)),
        "blocking_conditions": vars(check_blocking_conditions(inst, B, p, cfg.eps)),
        "identifiability_lower_bound": identifiability_lower_bound(inst, scn.family, p)._asdict(),
        "exceptional_upper_bound": exceptional_upper_bound(inst, p)._asdict(),
        "dsc_size": len(D),
    }
    if all(len(m) >= 2 for m in shell_type_index(inst, D).values()):
        doc["repeated_shell_lower_bound"] = repeated_shell_lower_bound(inst, D, p)._asdict()
    _print(doc)


def _overridden(args) -> ScenarioConfig:
    cfg = args.preset_config if getattr(args, "preset_config", None) else ScenarioConfig.load(args.config)
    changes = {}
    for name in ("seed", "trials", "mode", "eps"):
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    return cfg.replace(**changes) if changes else cfg


def _write(results, args):
    text = emit(results, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)


def cmd_simulate(args):
    cfg = _overridden(args)
    _write([run_trials(cfg, args.threads)], args)


def cmd_sweep(args):
    cfg = _overridden(args)
    param, values = args.param, args.values
    if param is None or values is None:
        with open(args.config) as fh:
            block = json.load(fh).get("sweep") or {}
        param = param or block.get("param")
        values = values or block.get("values")
    if param is None or values is None:
        raise ConfigError("sweep needs --param and --values (or a 'sweep' block in the config)")
    if isinstance(values, str):
        values = [int(v) for v in values.split(",") if v.strip()]
    _write(sweep(cfg, param, values, args.threads), args)


def cmd_scenario(args):
    params = dict(PRESETS[args.family])
    for name in ("d", "r", "R", "m", "ell", "n"):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
            if args.family == "ex1" and name == "m":
                params.pop("R", None)
    if args.family == "ex2" and args.k_size is not None:
        params["K"] = {"shape": args.k_shape, "size": args.k_size}
    if args.family == "ex3" and args.rank is not None:
        params["group"] = {"kind": "free", "rank": args.rank}
    args.preset_config = ScenarioConfig(args.family, params, alphabet_size=args.alphabet_size)
    cmd_simulate(args)


def _add_run_flags(sp, config_required=True):
    if config_required:
        sp.add_argument("--config", required=True, help="scenario JSON file")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--mode", choices=["certificates", "oracle"])
    sp.add_argument("--eps", type=float)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shotgun-id", description="Identifiability of patterns from shotgun reads.")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, help_ in [("certify", cmd_certify, "run both certificates on one pattern"),
                            ("oracle", cmd_oracle, "exact identifiability of one pattern")]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True)
        sp.add_argument("--pattern", required=True, help="pattern file")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("exact-repeat", help="exact repeat probability from a JSON description")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_exact_repeat)

    sp = sub.add_parser("bounds", help="condition checks and closed-form bounds for a scenario")
    sp.add_argument("--config", required=True)
    sp.add_argument("--eps", type=float)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate for one scenario")
    _add_run_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="Monte Carlo estimates across one parameter")
    _add_run_flags(sp)
    sp.add_argument("--param", choices=["r", "R", "m", "ell", "alphabet_size"])
    sp.add_argument("--values", help="comma-separated values")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("scenario", help="simulate a preset example family")
    sp.add_argument("family", choices=sorted(PRESETS))
    _add_run_flags(sp, config_required=False)
    for name in ("d", "r", "R", "m", "ell", "n", "rank"):
        sp.add_argument(f"--{name}", type=int)
    sp.add_argument("--k-size", type=int)
    sp.add_argument("--k-shape", choices=["cube", "diamond"], default="cube")
    sp.add_argument("--alphabet-size", type=int, default=2)
    sp.set_defaults(func=cmd_scenario)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CertificateConflict as exc:
        print(f"internal conflict: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
