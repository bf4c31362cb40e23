"""Command-line front end: analyze, sweep, verify, optimize-cost, find-channel.

State and sweep descriptions are YAML documents. Channels are given inline
with ``--p p0,p1,p2,p3`` (Model I) or ``--eta E --eta-prime E'`` (Model II).

Exit codes: 0 success, 1 input error, 2 infeasible problem or failed
verification.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import numpy as np
import yaml

from . import costopt, oracle, strategy, telefid
from .canonical import CanonicalForm, DetSign, canonicalize
from .channels import NoiseModelI, NoiseModelII, as_model_I, mutual_info_I, mutual_info_II
from .errors import InfeasibleError, NoisyTeleError, ParameterError, ScopeError
from .protocol import NAMED_STRATEGIES, STANDARD, CorrectionStrategy
from .qstate import StateFamilySpec, TwoQubitState, make_family

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
STATE_KINDS = ("dense", "pure", "werner", "tdiag")
SWEEP_VARIABLES = ("concurrence", "epsilon", "p0", "eta")


class InputError(NoisyTeleError):
    """Malformed input file or flag."""


def g6(x) -> str:
    return f"{float(x):.6g}"


def g12(x) -> str:
    return f"{float(x):.12g}"


def vec6(v) -> str:
    return "(" + ", ".join(g6(x) for x in v) + ")"


# Input parsing ---------------------------------------------------------------


def _load_yaml(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return yaml.safe_load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise InputError(f"{path}:{where}: {problem}") from None


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"field '{field}': expected a number, got {value!r}")
    return float(value)


def _vector(value, field: str, n: int) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise InputError(f"field '{field}': expected a list of {n} numbers")
    return [_number(v, f"{field}[{i}]") for i, v in enumerate(value)]


def _complex(value, field: str) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InputError(f"field '{field}': complex entries are [re, im]")
        return complex(_number(value[0], field + ".re"), _number(value[1], field + ".im"))
    return complex(_number(value, field))


def parse_state_spec(doc, source: str = "state") -> StateFamilySpec:
    """Turn a mapping with exactly one of dense/pure/werner/tdiag into a spec."""
    if not isinstance(doc, dict):
        raise InputError(f"{source}: expected a mapping with one of {', '.join(STATE_KINDS)}")
    if "state" in doc and isinstance(doc["state"], dict):
        doc = doc["state"]
    kinds = [k for k in STATE_KINDS if k in doc]
    if len(kinds) != 1:
        raise InputError(f"{source}: need exactly one of {', '.join(STATE_KINDS)}, found {kinds or 'none'}")
    kind = kinds[0]
    body = doc[kind]
    if kind == "dense":
        entries = body.get("matrix") if isinstance(body, dict) else body
        if not isinstance(entries, list) or len(entries) != 16:
            raise InputError(f"{source}: field 'dense.matrix': expected 16 entries, row-major")
        m = [_complex(v, f"dense.matrix[{i}]") for i, v in enumerate(entries)]
        return StateFamilySpec("dense", {"matrix": np.array(m).reshape(4, 4)})
    if not isinstance(body, dict):
        raise InputError(f"{source}: field '{kind}': expected a mapping")
    if kind == "pure":
        if "a" not in body:
            raise InputError(f"{source}: field 'pure.a' is required")
        return StateFamilySpec("pure", {"a": _number(body["a"], "pure.a")})
    if kind == "werner":
        if "epsilon" not in body:
            raise InputError(f"{source}: field 'werner.epsilon' is required")
        return StateFamilySpec("werner", {"epsilon": _number(body["epsilon"], "werner.epsilon")})
    if "t" not in body:
        raise InputError(f"{source}: field 'tdiag.t' is required")
    params = {"t": _vector(body["t"], "tdiag.t", 3)}
    for key in ("r", "s"):
        params[key] = _vector(body.get(key, [0, 0, 0]), f"tdiag.{key}", 3)
    return StateFamilySpec("tdiag", params)


def load_state(path: str) -> tuple[StateFamilySpec, TwoQubitState]:
    spec = parse_state_spec(_load_yaml(path), path)
    try:
        return spec, make_family(spec)
    except (ValueError, NoisyTeleError) as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_channel(args) -> NoiseModelI | NoiseModelII:
    if args.p is not None and (args.eta is not None or args.eta_prime is not None):
        raise InputError("give either --p or --eta/--eta-prime, not both")
    if args.eta is not None or args.eta_prime is not None:
        if args.eta is None or args.eta_prime is None:
            raise InputError("Model II needs both --eta and --eta-prime")
        return NoiseModelII(args.eta, args.eta_prime)
    if args.p is None:
        return NoiseModelI.noiseless()
    try:
        p = [float(x) for x in args.p.split(",")]
    except ValueError:
        raise InputError(f"--p: expected four comma-separated numbers, got {args.p!r}") from None
    return NoiseModelI(p)


def parse_strategy(text: str | None) -> CorrectionStrategy:
    if text is None:
        return STANDARD
    if text in NAMED_STRATEGIES:
        return NAMED_STRATEGIES[text]
    try:
        idx = [int(x.strip().lstrip("sS")) for x in text.split(",")]
        return CorrectionStrategy(tuple(idx))
    except ValueError:
        names = ", ".join(NAMED_STRATEGIES)
        raise InputError(f"--strategy: expected one of {names} or four Pauli indices like 2,1,3,0") from None


def describe_channel(ch) -> list[str]:
    if isinstance(ch, NoiseModelII):
        img = as_model_I(ch)
        i1, i2 = mutual_info_II(ch)
        return [
            f"channel: Model II eta = {g6(ch.eta)}, eta' = {g6(ch.eta_prime)}",
            f"  Model I image: p = {vec6(img.p)}",
            f"  mutual information: {g6(i1)} + {g6(i2)} = {g6(i1 + i2)} bits",
        ]
    return [
        f"channel: Model I p = {vec6(ch.p)}",
        f"  mutual information: {g6(mutual_info_I(ch))} bits",
    ]


def describe_canonical(cf: CanonicalForm) -> list[str]:
    return [
        "canonical form:",
        f"  |t| per axis (x, y, z): {vec6(cf.t)}",
        f"  |t| sorted: {vec6(cf.tmag)}",
        f"  lambda: {vec6(cf.lam)}",
        f"  det T sign: {cf.det_sign.name.lower()}",
    ]


# Commands --------------------------------------------------------------------


def cmd_analyze(args) -> int:
    spec, state = load_state(args.state)
    ch = parse_channel(args)
    strat = parse_strategy(args.strategy)
    cf, _ = canonicalize(state)
    lines = [f"state: {spec.kind}"] + describe_canonical(cf) + describe_channel(ch)

    std = telefid.analyze(cf, ch, strat)
    search = strategy.fidelity_over_all_strategies(cf, ch)
    best_delta = telefid.deviation(cf, ch, search.best)
    lines += [
        f"strategy {strat.label()}: F = {g6(std.F)}, Delta = {g6(std.Delta)}",
        f"optimal strategy {search.best.label()}: F = {g6(search.F)}, Delta = {g6(best_delta)}",
        f"non-classical (F > 2/3): {'yes' if std.nonclassical else 'no'}",
        f"dispersion-free (Delta <= {telefid.DISPERSION_TOL:g}): {'yes' if std.dispersion_free else 'no'}",
    ]
    try:
        ok, fn = telefid.nonclassical_condition(cf, ch)
        lines.append(f"f_noise = {g6(fn)}; sum |t| > 1 + 2 f_noise: {'true' if ok else 'false'}")
    except ScopeError as exc:
        lines.append(f"non-classical condition: {exc}")
    try:
        res = telefid.zero_deviation_condition(cf, ch)
        lines.append(f"zero-deviation residuals: {vec6(res)}")
    except ScopeError as exc:
        lines.append(f"zero-deviation condition: {exc}")
    print("\n".join(lines))
    return EXIT_OK


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    steps: int
    channel: NoiseModelI | NoiseModelII
    strategy: CorrectionStrategy
    state: StateFamilySpec | None


def parse_sweep(doc, source: str) -> SweepSpec:
    if not isinstance(doc, dict):
        raise InputError(f"{source}: expected a mapping")
    var = doc.get("variable")
    if var not in SWEEP_VARIABLES:
        raise InputError(f"{source}: field 'variable': expected one of {', '.join(SWEEP_VARIABLES)}, got {var!r}")
    rng = doc.get("range")
    if not isinstance(rng, (list, tuple)) or len(rng) != 3:
        raise InputError(f"{source}: field 'range': expected [lo, hi, steps]")
    lo, hi = _number(rng[0], "range[0]"), _number(rng[1], "range[1]")
    steps = rng[2]
    if isinstance(steps, bool) or not isinstance(steps, int):
        raise InputError(f"{source}: field 'range[2]': steps must be an integer")
    if not lo < hi:
        raise InputError(f"{source}: field 'range': need lo < hi, got {lo} >= {hi}")
    if steps < 2:
        raise InputError(f"{source}: field 'range[2]': need at least 2 steps, got {steps}")

    chdoc = doc.get("channel", {}) or {}
    if not isinstance(chdoc, dict):
        raise InputError(f"{source}: field 'channel': expected a mapping")
    try:
        if "p" in chdoc:
            ch = NoiseModelI(_vector(chdoc["p"], "channel.p", 4))
        elif "eta" in chdoc or "eta_prime" in chdoc:
            eta = _number(chdoc.get("eta", 1.0), "channel.eta")
            ch = NoiseModelII(eta, _number(chdoc.get("eta_prime", eta), "channel.eta_prime"))
        else:
            ch = NoiseModelI.noiseless()
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None

    state = None
    if var in ("p0", "eta"):
        if "state" not in doc:
            raise InputError(f"{source}: field 'state' is required for a {var} sweep")
        state = parse_state_spec(doc["state"], source)
    strat = parse_strategy(doc.get("strategy"))
    return SweepSpec(var, lo, hi, steps, ch, strat, state)


def _sweep_point(spec: SweepSpec, x: float):
    """Resource and channel at sweep value ``x``."""
    ch = spec.channel
    if spec.variable == "concurrence":
        if not 0 <= x <= 1:
            raise ParameterError(f"concurrence must lie in [0, 1], got {x}")
        a = math.sqrt((1 + math.sqrt(max(0.0, 1 - x * x))) / 2)
        state = make_family(StateFamilySpec("pure", {"a": a}))
    elif spec.variable == "epsilon":
        state = make_family(StateFamilySpec("werner", {"epsilon": x}))
    else:
        state = make_family(spec.state)
        if spec.variable == "p0":
            rest = as_model_I(ch).p[1:]
            share = rest / rest.sum() if rest.sum() > 0 else np.full(3, 1 / 3)
            ch = NoiseModelI(np.concatenate([[x], (1 - x) * share]))
        else:
            eta_p = ch.eta_prime if isinstance(ch, NoiseModelII) else x
            ch = NoiseModelII(x, eta_p)
    return canonicalize(state)[0], ch


def sweep_rows(spec: SweepSpec) -> list[tuple[float, float, float, int]]:
    rows = []
    for x in np.linspace(spec.lo, spec.hi, spec.steps):
        cf, ch = _sweep_point(spec, float(x))
        rep = telefid.analyze(cf, ch, spec.strategy)
        rows.append((float(x), rep.F, rep.Delta, int(rep.nonclassical)))
    return rows


def cmd_sweep(args) -> int:
    spec = parse_sweep(_load_yaml(args.sweep), args.sweep)
    try:
        rows = sweep_rows(spec)
    except (ValueError, NoisyTeleError) as exc:
        raise InputError(f"{args.sweep}: {exc}") from None
    try:
        fh = open(args.out, "w", encoding="utf-8", newline="") if args.out != "-" else sys.stdout
    except OSError as exc:
        raise InputError(f"{args.out}: cannot write ({exc.strerror})") from None
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([spec.variable, "F", "Delta", "nonClassical"])
        for x, F, D, nc in rows:
            w.writerow([g12(x), g12(F), g12(D), nc])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 1000:
        raise InputError(f"--samples must be at least 1000, got {args.samples}")
    _, state = load_state(args.state)
    ch = parse_channel(args)
    strat = parse_strategy(args.strategy)
    cf, _ = canonicalize(state)
    F, D = telefid.fidelity(cf, ch, strat), telefid.deviation(cf, ch, strat)
    # the oracle works on the canonical resource, as the closed forms do
    Fe, De = oracle.exact_average(cf.state(), ch, strat)
    run = oracle.haar_average(cf.state(), ch, strat, args.samples, args.seed, workers=args.workers)
    exact_ok = abs(F - Fe) <= 1e-10 and abs(D - De) <= 1e-10
    mc_ok = run.agrees_with(F, D)
    print("\n".join([
        f"closed form: F = {g6(F)}, Delta = {g6(D)}",
        f"exact oracle: F = {g6(Fe)}, Delta = {g6(De)}",
        f"Monte Carlo ({run.n_samples} samples, seed {args.seed}): meanF = {g6(run.meanF)}, "
        f"delta = {g6(run.delta)}, stdError = {g6(run.std_error)}",
        f"exact agreement (1e-10): {'pass' if exact_ok else 'FAIL'}",
        f"Monte Carlo agreement (5 stdError): {'pass' if mc_ok else 'FAIL'}",
    ]))
    return EXIT_OK if exact_ok and mc_ok else EXIT_FAIL


def cmd_optimize_cost(args) -> int:
    _, state = load_state(args.state)
    cf, _ = canonicalize(state)
    solve = costopt.min_cost_model_I if args.model == "I" else costopt.min_cost_model_II
    sol = solve(cf)
    lines = describe_canonical(cf) + [f"model: {args.model}", f"status: {sol.status}"]
    if not sol.feasible:
        lines.append(f"infeasible: sum |t| = {g6(cf.t.sum())} <= 1, no channel gives non-classical fidelity")
        print("\n".join(lines))
        return EXIT_FAIL
    lines += describe_channel(sol.channel)
    lines += [
        f"cost: {g6(sol.cost)} bits",
        f"constraint residual: {g6(sol.constraint_residual)}",
        f"stationary residuals: {vec6(sol.stationary_residuals)}",
    ]
    print("\n".join(lines))
    return EXIT_OK


def cmd_find_channel(args) -> int:
    _, state = load_state(args.state)
    cf, _ = canonicalize(state)
    fixed = {i: v for i, v in enumerate((args.p0, args.p1, args.p2, args.p3)) if v is not None}
    try:
        res = telefid.find_dispersion_free_channel(cf, fixed)
    except InfeasibleError as exc:
        print(str(exc))
        return EXIT_FAIL
    print("\n".join(describe_channel(res.channel) + [
        f"F = {g6(res.F)}, Delta = {g6(telefid.deviation(cf, res.channel))}",
        f"non-classical: {'yes' if res.nonclassical else 'no'}",
        f"zero-deviation residuals: {vec6(telefid.zero_deviation_condition(cf, res.channel))}",
    ]))
    return EXIT_OK


# Argument parsing ------------------------------------------------------------


def _add_channel_flags(p):
    p.add_argument("--p", help="Model I probabilities p0,p1,p2,p3")
    p.add_argument("--eta", type=float, help="Model II: first bit correct with probability eta")
    p.add_argument("--eta-prime", type=float, help="Model II: second bit correct with probability eta'")
    p.add_argument("--strategy", help="table3..table6, standard, or four Pauli indices")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="noisytele", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="fidelity, deviation and conditions for one state and channel")
    p.add_argument("state")
    _add_channel_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="tabulate F and Delta along a one-parameter family")
    p.add_argument("sweep")
    p.add_argument("--out", default="-", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="compare closed forms with the simulator")
    p.add_argument("state")
    _add_channel_flags(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize-cost", help="minimum classical cost for non-classical fidelity")
    p.add_argument("state")
    p.add_argument("--model", choices=("I", "II"), default="I")
    p.set_defaults(func=cmd_optimize_cost)

    p = sub.add_parser("find-channel", help="channel that makes teleportation dispersion-free")
    p.add_argument("state")
    for i in range(4):
        p.add_argument(f"--p{i}", type=float, help=f"fix p{i}")
    p.set_defaults(func=cmd_find_channel)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, ScopeError, ValueError, NoisyTeleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
