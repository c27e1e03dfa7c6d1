"""Command-line front end: sweeps, thresholds, witnesses, cats, verification.

Every failure path exits nonzero after printing a single line starting with
``error: `` to stderr.  CSV output is deterministic: identical flags produce
identical bytes regardless of worker count.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import __version__, catstates, verify
from .chsh import (
    OptimizerSettings,
    Theorem1Witness,
    s_max_atomic,
    s_max_over_alpha,
    scenario_coefficients,
    theorem1_witness,
    violation_threshold,
)
from .coefficients import optimal_bin
from .model import ChannelSpec, LossConvention, Scenario, ScenarioKind, StateSpec

CSV_HEADER = "t_line,eta_or_eta_a,s_max,alpha_opt,nu_opt,gamma_opt,b_opt,c1,c2,c3"


@dataclass(frozen=True)
class SweepRequest:
    """Grid description for the sweep command."""

    scenario: Scenario
    t_range: tuple[float, float, float]
    second_axis: str  # "eta" | "eta_a" | "none"
    second_range: tuple[float, float, float] | None
    output_path: str
    jobs: int
    alpha_max: float


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def _parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be MIN:MAX:STEP, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0.0:
        raise ValueError(f"range step must be positive, got {step}")
    if not (0.0 <= lo <= hi <= 1.0):
        raise ValueError(f"range must lie within [0,1], got {text!r}")
    return lo, hi, step


def _range_values(rng: tuple[float, float, float]) -> list[float]:
    lo, hi, step = rng
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + i * step for i in range(count + 1)]


def _scenario_from_args(args) -> Scenario:
    kind = ScenarioKind(args.scenario)
    convention = LossConvention(args.convention)
    return Scenario(kind=kind, loss_convention=convention)


def _sweep_point(task) -> tuple:
    kind, convention, t_line, second, axis, alpha_max = task
    scenario = Scenario(kind=ScenarioKind(kind), loss_convention=LossConvention(convention))
    settings = OptimizerSettings(alpha_grid=(0.05, alpha_max, 0.05))
    if axis == "eta_a":
        channel = ChannelSpec(t_line=t_line, eta=1.0, eta_a=second)
        result = s_max_atomic(channel, settings)
    else:
        eta = second if axis == "eta" else 1.0
        channel = ChannelSpec(t_line=t_line, eta=eta, eta_a=1.0)
        result = s_max_over_alpha(channel, scenario, settings)
    coeffs = scenario_coefficients(result.alpha_opt, channel, scenario, result.b_opt)
    return (
        t_line,
        second,
        result.s_value,
        result.alpha_opt,
        result.nu_opt,
        result.gamma_opt,
        result.b_opt,
        coeffs.c1,
        coeffs.c2,
        coeffs.c3,
    )


def cmd_sweep(args) -> int:
    scenario = _scenario_from_args(args)
    second_axis = "none"
    second_range = None
    if args.eta is not None and args.eta_a is not None:
        raise ValueError("choose one of --eta or --eta-a as the second axis")
    if args.eta is not None:
        if scenario.kind is not ScenarioKind.PHOTOCOUNT:
            raise ValueError("--eta sweeps apply to the photocount scenario")
        second_axis, second_range = "eta", _parse_range(args.eta)
    elif args.eta_a is not None:
        if scenario.kind is not ScenarioKind.TWO_HOMODYNE:
            raise ValueError("--eta-a sweeps apply to the two-homodyne scenario")
        second_axis, second_range = "eta_a", _parse_range(args.eta_a)
    request = SweepRequest(
        scenario=scenario,
        t_range=_parse_range(args.t_line),
        second_axis=second_axis,
        second_range=second_range,
        output_path=args.out,
        jobs=args.jobs,
        alpha_max=args.alpha_max,
    )
    run_sweep(request)
    return 0


def run_sweep(request: SweepRequest) -> None:
    """Evaluate the grid (optionally in parallel) and write the CSV."""
    t_values = _range_values(request.t_range)
    second_values = (
        _range_values(request.second_range) if request.second_range else [1.0]
    )
    tasks = [
        (
            request.scenario.kind.value,
            request.scenario.loss_convention.value,
            t,
            s,
            request.second_axis,
            request.alpha_max,
        )
        for t in t_values
        for s in second_values
    ]
    if request.jobs > 1:
        with ProcessPoolExecutor(max_workers=request.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=8))
    else:
        rows = [_sweep_point(task) for task in tasks]

    second_desc = (
        f"{request.second_axis}={_range_desc(request.second_range)}"
        if request.second_range
        else "second_axis=none"
    )
    with open(request.output_path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# hybell sweep v{__version__}\n")
        handle.write(
            f"# scenario={request.scenario.kind.value}"
            f" convention={request.scenario.loss_convention.value}"
            f" t_line={_range_desc(request.t_range)} {second_desc}"
            f" alpha_max={_fmt(request.alpha_max)}\n"
        )
        handle.write(CSV_HEADER + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _range_desc(rng: tuple[float, float, float]) -> str:
    return ":".join(_fmt(v) for v in rng)


def cmd_threshold(args) -> int:
    scenario = _scenario_from_args(args)
    free_param = args.param.replace("-", "_")
    fixed = ChannelSpec(t_line=args.fixed_t_line, eta=args.fixed_eta, eta_a=1.0)
    value = violation_threshold(scenario, free_param, fixed, tol=args.tol)
    lo, hi = max(value - args.tol, 0.0), min(value + args.tol, 1.0)

    def s_at(x: float) -> float:
        from dataclasses import replace

        channel = replace(fixed, **{free_param: x})
        if free_param == "eta_a":
            return s_max_atomic(channel).s_value
        return s_max_over_alpha(channel, scenario).s_value

    # bracketing S values differ from 2 at the 1e-13 level near threshold,
    # so print them at full double precision
    print(
        f"threshold {free_param} = {_fmt(value)}"
        f" (S({_fmt(lo)}) = {s_at(lo):.17g}, S({_fmt(hi)}) = {s_at(hi):.17g})"
    )
    return 0


def cmd_theorem1(args) -> int:
    etas = args.etas or [1.0, 0.1, 0.01, 0.001]
    print("eta          alpha_witness  s_value        asymptotic_alpha")
    failures = 0
    for eta in etas:
        witness = theorem1_witness(eta, alpha_search_max=args.alpha_max)
        failures += 0 if witness.found else 1
        print(_theorem1_row(witness))
    if failures:
        raise RuntimeError(f"{failures} eta value(s) yielded no witness below the search cap")
    return 0


def _theorem1_row(witness: Theorem1Witness) -> str:
    edge = _fmt(witness.asymptotic_alpha) if witness.asymptotic_alpha > 0 else "none"
    if not witness.found:
        return f"{_fmt(witness.eta):<12} none           none           {edge}"
    return (
        f"{_fmt(witness.eta):<12} {_fmt(witness.alpha):<14} "
        f"{_fmt(witness.s_value):<14} {edge}"
    )


def cmd_cat(args) -> int:
    state = StateSpec(nu=args.nu, alpha_mag=args.alpha)
    cat = catstates.herald_cat(state)
    cascade = catstates.equal_amplitude_cascade(args.modes)
    amps = catstates.split_cat(cat, cascade)
    factors = [abs(a) / abs(cat.alpha) for a in amps] if cat.alpha else []
    through = math.prod(cascade.transmittivities)
    print(f"cat amplitude |alpha_cat| = {_fmt(abs(cat.alpha))} (phase i)")
    print(f"normalization N = {_fmt(cat.norm)}")
    print(f"herald probability = {_fmt(catstates.herald_probability(state))}")
    print(
        "cascade transmittivities = "
        + ", ".join(_fmt(t) for t in cascade.transmittivities)
    )
    print("per-mode |amplitude| = " + ", ".join(_fmt(abs(a)) for a in amps))
    energy = sum(f * f for f in factors) if factors else 1.0
    print(f"energy check sum f^2 = {_fmt(energy)} (last mode transmitted, f = {_fmt(through)})")
    return 0


def cmd_verify(args) -> int:
    results = verify.run_suites(seed=args.seed, samples=args.samples)
    all_ok = True
    for suite in results:
        ok = suite.passed(args.tol_scale)
        all_ok = all_ok and ok
        worst = suite.worst(args.tol_scale)
        print(
            f"suite {suite.name}: {len(suite.checks)} checks,"
            f" max |dev| = {suite.max_dev:.3e},"
            f" worst '{worst.label}' dev {worst.dev:.3e} vs tol {worst.tol * args.tol_scale:.3e}"
            f" -> {'PASS' if ok else 'FAIL'}"
        )
    print(f"verify: {'PASS' if all_ok else 'FAIL'}")
    if not all_ok:
        failed = ", ".join(s.name for s in results if not s.passed(args.tol_scale))
        raise RuntimeError(f"verification failed in suite(s): {failed}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line machine-parsable failures
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hybell",
        description="CHSH violation analysis for hybrid atom-light entangled states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="parameter sweep written as CSV")
    sweep.add_argument("--scenario", choices=["photocount", "two-homodyne"], required=True)
    sweep.add_argument("--convention", choices=["paper", "born"], default="born")
    sweep.add_argument("--t-line", required=True, metavar="MIN:MAX:STEP")
    sweep.add_argument("--eta", metavar="MIN:MAX:STEP")
    sweep.add_argument("--eta-a", dest="eta_a", metavar="MIN:MAX:STEP")
    sweep.add_argument("--alpha-max", type=float, default=12.0)
    sweep.add_argument("--out", required=True, metavar="PATH")
    sweep.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sweep.set_defaults(func=cmd_sweep)

    threshold = sub.add_parser("threshold", help="minimum parameter for violation")
    threshold.add_argument("param", choices=["t-line", "eta-a"])
    threshold.add_argument("--scenario", choices=["photocount", "two-homodyne"], required=True)
    threshold.add_argument("--convention", choices=["paper", "born"], default="born")
    threshold.add_argument("--eta", dest="fixed_eta", type=float, default=1.0,
                           help="fixed photocounting efficiency")
    threshold.add_argument("--t-line", dest="fixed_t_line", type=float, default=1.0,
                           help="fixed transmission (eta-a threshold only)")
    threshold.add_argument("--tol", type=float, default=1e-4)
    threshold.set_defaults(func=cmd_threshold)

    theorem1 = sub.add_parser("theorem1", help="low-efficiency violation witnesses")
    theorem1.add_argument("etas", nargs="*", type=float)
    theorem1.add_argument("--alpha-max", type=float, default=500.0)
    theorem1.set_defaults(func=cmd_theorem1)

    cat = sub.add_parser("cat", help="heralded cat state and cascade report")
    cat.add_argument("--alpha", type=float, required=True)
    cat.add_argument("--nu", type=float, default=math.pi / 4)
    cat.add_argument("--modes", type=int, default=2)
    cat.set_defaults(func=cmd_cat)

    verify_cmd = sub.add_parser("verify", help="run all oracle cross-validation suites")
    verify_cmd.add_argument("--seed", type=int, default=0)
    verify_cmd.add_argument("--samples", type=int, default=50)
    verify_cmd.add_argument("--tol-scale", type=float, default=1.0,
                            help="scale all tolerances (harness self-test)")
    verify_cmd.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - single contract for all failures
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
