"""``relilat`` command-line front end.

Exit codes: 0 success, 1 parse error, 2 validation error, 3 numerical
failure, 4 verification failure. Every error prints one line to stderr
starting with ``relilat: error[<kind>]:``.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from .errors import (
    IdentityViolation,
    NumericalError,
    ParseError,
    RelilatError,
    ValidationError,
)
from .mcoracle import DEFAULT_SAMPLES, estimate_reliability
from .reliability import (
    Formula,
    ReliabilityQuery,
    mttf,
    reliability_values,
)
from .setfun import format_subset
from .specfile import SystemSpec, describe, emit_canonical, parse_spec_file
from .structure import SystemStructure

EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

COMMANDS = ("check", "paths", "cuts", "mobius", "dual", "reliability", "mttf", "dist", "verify")


class VerificationFailed(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_grid(text: str) -> np.ndarray:
    """'start:stop:step' with stop included when it lies on the grid."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ValidationError(f"--grid expects start:stop:step, got {text!r}") from None
    if not (math.isfinite(start) and math.isfinite(stop) and step > 0 and stop >= start):
        raise ValidationError(f"--grid needs finite start <= stop and step > 0, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def parse_times(text: str) -> np.ndarray:
    try:
        return np.array([float(p) for p in text.split(",") if p.strip()])
    except ValueError:
        raise ValidationError(f"--times expects comma-separated numbers, got {text!r}") from None


def _times(args) -> np.ndarray:
    if args.grid is not None and args.times is not None:
        raise ValidationError("give either --grid or --times, not both")
    if args.grid is not None:
        ts = parse_grid(args.grid)
    elif args.times is not None:
        ts = parse_times(args.times)
    else:
        raise ValidationError(f"{args.command} needs --grid or --times")
    if ts.size == 0 or np.isnan(ts).any() or (ts < 0).any():
        raise ValidationError("times must be nonnegative numbers")
    return ts


def _lifetimes(spec: SystemSpec, command: str):
    if spec.lifetimes is None:
        raise ValidationError(f"{command} needs a lifetimes section in the spec file")
    return spec.lifetimes


def _structure(spec: SystemSpec, at_time: Optional[float]) -> SystemStructure:
    system = spec.system
    if isinstance(system, SystemStructure):
        return system
    if at_time is None:
        if system.is_unweighted:
            return system.threshold(0.0)
        raise ValidationError("weighted systems need --at-time to select the structure v_t")
    if at_time < 0:
        raise ValidationError("--at-time must be >= 0")
    return system.threshold(at_time)


def _query(spec: SystemSpec, args) -> ReliabilityQuery:
    return ReliabilityQuery(spec.system, _lifetimes(spec, args.command), Formula(args.formula))


def cmd_check(spec: SystemSpec, args, out) -> None:
    if args.emit_canonical:
        out.write(emit_canonical(spec))
        return
    for line in describe(spec):
        print(line, file=out)


def cmd_sets(spec: SystemSpec, args, out) -> None:
    s = _structure(spec, args.at_time)
    sets = s.minimal_paths if args.command == "paths" else s.minimal_cuts
    for mask in sets:
        print(format_subset(mask), file=out)


def cmd_mobius(spec: SystemSpec, args, out) -> None:
    s = _structure(spec, args.at_time)
    print("subset,m_v", file=out)
    coef = s.m_v.coefficients
    for mask in np.flatnonzero(coef):
        print(f"{format_subset(int(mask))},{int(coef[mask])}", file=out)


def cmd_dual(spec: SystemSpec, args, out) -> None:
    s = _structure(spec, args.at_time)
    print("subset,v,v_star", file=out)
    for mask, (v, vs) in enumerate(zip(s.table, s.v_star.values)):
        print(f"{format_subset(mask)},{int(v)},{int(vs)}", file=out)


def cmd_reliability(spec: SystemSpec, args, out) -> None:
    q = _query(spec, args)
    ts = _times(args)
    values = np.clip(reliability_values(q, ts), 0.0, 1.0)
    print("t,R_S", file=out)
    for t, r in zip(ts, values):
        print(f"{fmt(t)},{fmt(r)}", file=out)


def cmd_dist(spec: SystemSpec, args, out) -> None:
    q = _query(spec, args)
    ts = _times(args)
    values = np.clip(1.0 - reliability_values(q, ts), 0.0, 1.0)
    print("t,F", file=out)
    for t, f in zip(ts, values):
        print(f"{fmt(t)},{fmt(f)}", file=out)


def cmd_mttf(spec: SystemSpec, args, out) -> None:
    q = ReliabilityQuery(spec.system, _lifetimes(spec, args.command))
    res = mttf(q)
    print(f"{fmt(res.value)} {res.method}", file=out)


def cmd_verify(spec: SystemSpec, args, out) -> None:
    q = _query(spec, args)
    ts = _times(args)
    exact = np.clip(reliability_values(q, ts), 0.0, 1.0)
    print("t,exact,mc_mean,mc_stderr,abs_diff,status", file=out)
    failed = 0
    for t, r in zip(ts, exact):
        est = estimate_reliability(spec.system, q.lifetimes, float(t), args.samples, args.seed)
        ok = est.covers(float(r))
        failed += not ok
        print(
            f"{fmt(t)},{fmt(r)},{fmt(est.mean)},{fmt(est.stderr)},"
            f"{fmt(abs(r - est.mean))},{'PASS' if ok else 'FAIL'}",
            file=out,
        )
    if failed:
        raise VerificationFailed(f"{failed} of {len(ts)} points outside mean +- 3 stderr")


HANDLERS = {
    "check": cmd_check,
    "paths": cmd_sets,
    "cuts": cmd_sets,
    "mobius": cmd_mobius,
    "dual": cmd_dual,
    "reliability": cmd_reliability,
    "mttf": cmd_mttf,
    "dist": cmd_dist,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relilat",
        description="Exact reliability analysis of semicoherent systems and weighted lattice polynomials.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("specfile")
    parser.add_argument("--grid", help="time grid start:stop:step (stop included)")
    parser.add_argument("--times", help="comma-separated times")
    parser.add_argument(
        "--formula",
        default="auto",
        choices=[f.value for f in Formula],
        help="reliability route (default auto)",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    parser.add_argument("--at-time", type=float, dest="at_time",
                        help="threshold time selecting v_t for weighted systems")
    parser.add_argument("--emit-canonical", action="store_true", dest="emit_canonical",
                        help="with check: print the canonical spec instead of a report")
    return parser


def _fail(kind: str, msg: str, code: int) -> int:
    one_line = " ".join(str(msg).split())
    print(f"relilat: error[{kind}]: {one_line}", file=sys.stderr)
    return code


def run(argv: Sequence[str], out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(list(argv))
    try:
        spec = parse_spec_file(args.specfile)
        HANDLERS[args.command](spec, args, out)
    except ValidationError as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    except ParseError as exc:
        return _fail("parse", exc, EXIT_PARSE)
    except (VerificationFailed, IdentityViolation) as exc:
        return _fail("verify", exc, EXIT_VERIFY)
    except NumericalError as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except RelilatError as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    code = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
