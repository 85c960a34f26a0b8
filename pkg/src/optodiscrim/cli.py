"""Command-line front end.

Every subcommand writes a CSV (or, for ``verify``, a plain report). CSV files
start with ``#`` comment lines recording the tool version and every resolved
flag, followed by the column header and one row per point. Numbers are
written with 17 significant digits, so identical flags give identical bytes.

Exit codes: 0 success, 2 usage or domain error, 3 non-convergence,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
from typing import Sequence

import numpy as np

from . import __version__
from . import verify as verify_mod
from .beamsplitter import NoonPairState, beamsplitter_tradeoff_curve, canonical_delta, optimal_beamsplitter_state
from .coherent import (
    CoherentStrategy,
    advantage_ratio,
    coherent_energy_for_error,
    coherent_error,
    coherent_tradeoff_curve,
    optimal_coherent_strategy,
)
from .fock import (
    DeviceSpec,
    DomainError,
    TradeoffPoint,
    TruncatedState,
    error_probability,
    expect_unitary,
    mean_photons,
)
from .optimizer import OptimizerConfig, lower_frontier, sweep_with_cutoff_refinement

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3
EXIT_VERIFY_FAILED = 4

COLUMNS = ["p_error", "mean_photons", "energy", "strategy", "state_descriptor"]


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _complex_token(a: complex) -> str:
    return f"{a.real:.17g}{a.imag:+.17g}j"


def format_descriptor(obj) -> str:
    """Compact, parseable token describing the input state behind a point."""
    if isinstance(obj, NoonPairState):
        if obj.n2 != 0:
            raise ValueError("only vacuum-branch NOON pairs have a token form")
        return f"noon(n={obj.n1};a2={obj.a1**2:.16e})"
    if isinstance(obj, CoherentStrategy):
        return f"coherent(eta={obj.eta:.16e};mode={obj.best_mode})"
    if isinstance(obj, TruncatedState):
        # every nonzero amplitude is kept: near the vacuum the error probability
        # moves like the square root of any dropped weight
        parts = [
            ",".join(map(str, k)) + "=" + _complex_token(complex(a))
            for k, a in zip(obj.indices, obj.amps)
            if a != 0
        ]
        return f"amps[cutoff={obj.cutoff};" + ";".join(parts) + "]"
    raise TypeError(f"no descriptor format for {type(obj).__name__}")


_NOON_RE = re.compile(r"^noon\(n=(\d+);a2=([^)]+)\)$")
_COH_RE = re.compile(r"^coherent\(eta=([^;]+);mode=(\d+)\)$")
_AMPS_RE = re.compile(r"^amps\[cutoff=(\d+);(.*)\]$")


def parse_descriptor(token: str, device: DeviceSpec) -> TruncatedState | CoherentStrategy:
    if m := _NOON_RE.match(token):
        n, w = int(m.group(1)), float(m.group(2))
        return NoonPairState(n, 0, math.sqrt(w), math.sqrt(1.0 - w), canonical_delta(device.phases[0])).to_state()
    if m := _COH_RE.match(token):
        strat = optimal_coherent_strategy(float(m.group(1)), device)
        if strat.best_mode != int(m.group(2)):
            raise ValueError("descriptor mode disagrees with the device's most sensitive mode")
        return strat
    if m := _AMPS_RE.match(token):
        amps = {}
        for item in filter(None, m.group(2).split(";")):
            idx, val = item.split("=")
            amps[tuple(int(v) for v in idx.split(","))] = complex(val)
        vec = np.array(list(amps.values()))
        vec = vec / np.linalg.norm(vec)
        return TruncatedState.from_vector(list(amps), vec, int(m.group(1)))
    raise ValueError(f"unrecognized state descriptor {token!r}")


def evaluate_descriptor(token: str, device: DeviceSpec) -> tuple[float, float]:
    """Recompute (P_e, <N>) from a descriptor, independently of the producing solver."""
    obj = parse_descriptor(token, device)
    if isinstance(obj, CoherentStrategy):
        return coherent_error(obj.eta, device), obj.eta
    return error_probability(abs(expect_unitary(obj, device))), mean_photons(obj)


def read_csv(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Split a tool CSV into its ``# key=value`` metadata and data rows."""
    meta: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))


# argument parsing


def _float_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_delta(parser: argparse.ArgumentParser, required: bool = True) -> None:
    g = parser.add_mutually_exclusive_group(required=required)
    g.add_argument("--delta", type=float, help="beamsplitter phase in radians")
    g.add_argument("--delta-frac-pi", type=float, help="beamsplitter phase as a multiple of pi")


def _add_q_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q-list", type=_float_list, help="comma-separated error probabilities")
    parser.add_argument("--q-min", type=float, default=0.01)
    parser.add_argument("--q-max", type=float, default=0.49)
    parser.add_argument("--points", type=int, default=49)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", default="-", help="output path (default: stdout)")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optodiscrim",
        description="Energy/error tradeoff for discriminating passive optical devices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("beamsplitter", help="exact optimal frontier for a beamsplitter")
    _add_delta(p)
    _add_q_grid(p)
    _add_common(p)

    p = sub.add_parser("general", help="iterative frontier for a diagonal device")
    p.add_argument("--phases", type=_float_list, required=True, help="per-mode phases in radians")
    p.add_argument("--p-list", type=_float_list, help="tradeoff weights in (0, 1)")
    p.add_argument("--cutoff", type=int, default=8)
    p.add_argument("--max-cutoff", type=int, default=64)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument(
        "--max-gap",
        type=float,
        default=0.02,
        help="bisect p until neighbouring points differ by at most this in P_e and <N> (0 disables)",
    )
    _add_common(p)

    p = sub.add_parser("coherent", help="coherent-state / homodyne baseline")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--phases", type=_float_list)
    src.add_argument("--delta", type=float)
    src.add_argument("--delta-frac-pi", type=float)
    _add_q_grid(p)
    _add_common(p)

    p = sub.add_parser("compare", help="optimal vs coherent photon numbers at equal error")
    _add_delta(p)
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--q-list", type=_float_list)
    _add_common(p)

    p = sub.add_parser("verify", help="run the oracle agreement suites")
    p.add_argument("suite", nargs="?", default="all", choices=["all", *verify_mod.SUITES])
    _add_common(p)
    return parser


DEFAULT_P_GRID = tuple(float(x) for x in np.round(np.linspace(0.02, 0.78, 39), 10))


def _resolve_delta(args) -> float:
    if getattr(args, "delta_frac_pi", None) is not None:
        flag, delta = "--delta-frac-pi", args.delta_frac_pi * math.pi
    else:
        flag, delta = "--delta", args.delta
    if not math.isfinite(delta):
        raise UsageError(flag, "must be finite")
    if canonical_delta(delta) == 0.0:
        raise UsageError(flag, "devices identical (delta = 0 mod 2 pi)")
    return delta


def _resolve_q_grid(args, open_upper: bool) -> list[float]:
    if args.q_list is not None:
        flag, qs = "--q-list", list(args.q_list)
    else:
        if args.points < 1:
            raise UsageError("--points", "must be at least 1")
        flag = "--q-min/--q-max"
        qs = [float(x) for x in np.linspace(args.q_min, args.q_max, args.points)]
    for q in qs:
        ok = 0.0 < q < 0.5 if open_upper else 0.0 < q <= 0.5
        if not ok:
            bound = "(0, 1/2)" if open_upper else "(0, 1/2]"
            raise UsageError(flag, f"error probability {q!r} outside {bound}")
    return qs


def _resolve_phases(flag: str, phases: list[float]) -> DeviceSpec:
    if not phases:
        raise UsageError(flag, "at least one phase is required")
    if not all(math.isfinite(x) for x in phases):
        raise UsageError(flag, "phases must be finite")
    dev = DeviceSpec(tuple(phases))
    if dev.delta_star == 0.0:
        raise UsageError(flag, "devices identical (all phases are zero)")
    return dev


def _meta_lines(command: str, items: dict[str, object]) -> list[str]:
    lines = [f"# tool=optodiscrim {__version__}", f"# command={command}"]
    for key in sorted(items):
        val = items[key]
        if isinstance(val, float):
            val = fmt(val)
        elif isinstance(val, (list, tuple)):
            val = ",".join(fmt(v) if isinstance(v, float) else str(v) for v in val)
        lines.append(f"# {key}={val}")
    return lines


def _render(meta: list[str], columns: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    for line in meta:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _point_row(pt: TradeoffPoint) -> list[str]:
    return [fmt(pt.p_error), fmt(pt.mean_photons), fmt(pt.energy), pt.strategy.value, format_descriptor(pt.state_descriptor)]


def cmd_beamsplitter(args) -> tuple[str, int]:
    delta = _resolve_delta(args)
    qs = _resolve_q_grid(args, open_upper=False)
    points = beamsplitter_tradeoff_curve(delta, qs)
    dev = DeviceSpec.beamsplitter(delta)
    meta = _meta_lines("beamsplitter", {"delta": delta, "q_grid": qs, "seed": args.seed, "device_phases": list(dev.phases)})
    return _render(meta, COLUMNS, [_point_row(pt) for pt in points]), EXIT_OK


def cmd_coherent(args) -> tuple[str, int]:
    if args.phases is not None:
        dev = _resolve_phases("--phases", args.phases)
    else:
        dev = DeviceSpec.beamsplitter(_resolve_delta(args))
    qs = _resolve_q_grid(args, open_upper=True)
    points = coherent_tradeoff_curve(dev, qs)
    meta = _meta_lines("coherent", {"q_grid": qs, "seed": args.seed, "device_phases": list(dev.phases)})
    return _render(meta, COLUMNS + ["eta"], [_point_row(pt) + [fmt(pt.mean_photons)] for pt in points]), EXIT_OK


def cmd_compare(args) -> tuple[str, int]:
    delta = _resolve_delta(args)
    qs = list(args.q_list) if args.q_list is not None else [args.q]
    for q in qs:
        if not (0.0 < q < 0.5):
            raise UsageError("--q-list" if args.q_list is not None else "--q", f"{q!r} outside (0, 1/2)")
    dev = DeviceSpec.beamsplitter(delta)
    rows = []
    for q in qs:
        opt = optimal_beamsplitter_state(delta, q)
        eta = coherent_energy_for_error(q, dev).eta
        rows.append([fmt(canonical_delta(delta)), fmt(q), str(opt.n_star), fmt(opt.point.mean_photons), fmt(eta), fmt(advantage_ratio(dev, q))])
    meta = _meta_lines("compare", {"delta": delta, "q_grid": qs, "seed": args.seed, "device_phases": list(dev.phases)})
    cols = ["delta", "q", "n_star", "optimal_mean_photons", "coherent_eta", "advantage_ratio"]
    return _render(meta, cols, rows), EXIT_OK


def cmd_general(args) -> tuple[str, int]:
    dev = _resolve_phases("--phases", args.phases)
    p_grid = list(DEFAULT_P_GRID if args.p_list is None else args.p_list)
    for p in p_grid:
        if not (0.0 < p < 1.0):
            raise UsageError("--p-list", f"tradeoff weight {p!r} outside (0, 1)")
    if args.cutoff < 1:
        raise UsageError("--cutoff", "must be a positive integer")
    if args.max_cutoff < args.cutoff:
        raise UsageError("--max-cutoff", "must be at least --cutoff")
    if not args.alpha > 0:
        raise UsageError("--alpha", "must be positive")
    if args.max_iters < 1:
        raise UsageError("--max-iters", "must be positive")
    if not args.tol > 0:
        raise UsageError("--tol", "must be positive")
    if not (args.max_gap >= 0 and math.isfinite(args.max_gap)):
        raise UsageError("--max-gap", "must be a non-negative number")

    config = OptimizerConfig(
        p=0.5, alpha=args.alpha, cutoff=args.cutoff, max_iters=args.max_iters, grad_tol=args.tol, seed=args.seed
    )
    traces, stable = sweep_with_cutoff_refinement(
        dev, p_grid, config, max_cutoff=args.max_cutoff, max_gap=args.max_gap or None
    )
    if not p_grid:
        stable = True
    hull = lower_frontier(traces, key=lambda tr: (tr.final_point.p_error, tr.final_point.mean_photons))
    rows = [
        _point_row(tr.final_point) + [fmt(tr.p), str(tr.converged).lower(), str(tr.cutoff), str(tr.iterations)]
        for tr in hull
    ]
    final_cutoff = traces[0].cutoff if traces else args.cutoff
    meta = _meta_lines(
        "general",
        {
            "p_grid": p_grid,
            "cutoff": args.cutoff,
            "max_cutoff": args.max_cutoff,
            "final_cutoff": final_cutoff,
            "cutoff_stable": str(stable).lower(),
            "alpha": args.alpha,
            "max_iters": args.max_iters,
            "max_gap": args.max_gap,
            "tol": args.tol,
            "seed": args.seed,
            "device_phases": list(dev.phases),
        },
    )
    text = _render(meta, COLUMNS + ["p", "converged", "cutoff", "iterations"], rows)
    ok = stable and all(tr.converged for tr in traces)
    return text, EXIT_OK if ok else EXIT_NONCONVERGED


def cmd_verify(args) -> tuple[str, int]:
    results = verify_mod.run(args.suite)
    lines = [f"{suite:<12} {check.line()}" for suite, check in results]
    failed = sum(not c.passed for _, c in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", EXIT_OK if failed == 0 else EXIT_VERIFY_FAILED


COMMANDS = {
    "beamsplitter": cmd_beamsplitter,
    "general": cmd_general,
    "coherent": cmd_coherent,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"optodiscrim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"optodiscrim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    if code == EXIT_NONCONVERGED:
        print(f"optodiscrim {args.command}: warning: a point did not converge or the cutoff did not stabilize", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
