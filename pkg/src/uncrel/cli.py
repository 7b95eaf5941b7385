"""Command-line front end: ``uncrel sweep | verify | bounds``.

Exit codes:

* 0 - success
* 1 - usage error or invalid input data
* 2 - a bound violation beyond tolerance was found
* 3 - I/O failure

Angles are radians by default; append ``deg`` to give degrees, e.g.
``--fixed 60deg``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from ._version import __version__
from .core import DensityMatrix, Observable, PureState, QuantumState
from .errors import ContractError
from .harness import SweepSpec, emit, run_sweep, run_verify
from .qubit import BlochAngles, StokesVector, bloch_to_state, pauli_triple, stokes_to_density
from .relations import (
    ObservableSet,
    RELATION_BY_LABEL,
    SUM_FORM_RELATIONS,
    BoundReport,
    evaluate_all,
)
from .shots import ShotPlan


class _Parser(argparse.ArgumentParser):
    """Argparse exits with status 2 on bad flags; this CLI reserves 2 for
    verification failures, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_angle(text: str) -> float:
    """Parse an angle: plain radians, or degrees with a ``deg`` suffix."""
    cleaned = text.strip().lower()
    try:
        if cleaned.endswith("deg"):
            return math.radians(float(cleaned[:-3]))
        if cleaned.endswith("rad"):
            return float(cleaned[:-3])
        return float(cleaned)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="uncrel",
        description="Evaluate and verify variance uncertainty relations.",
    )
    parser.add_argument("--version", action="version", version=f"uncrel {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    sweep = sub.add_parser(
        "sweep",
        help="tabulate bounds along a one-parameter family of qubit states",
        description=(
            "Sweep one Bloch angle over its full range and tabulate the "
            "sum-form bounds at each grid point, exactly or from simulated "
            "counting statistics."
        ),
    )
    sweep.add_argument(
        "--mode", required=True, choices=("theta", "phi"),
        help="which angle varies; the other stays at --fixed",
    )
    sweep.add_argument(
        "--fixed", default=None, metavar="ANGLE",
        help="held angle (default: 0 for theta sweeps, pi/3 for phi sweeps)",
    )
    sweep.add_argument(
        "--steps", type=_positive_int, default=None,
        help="grid points including both endpoints (default: 13 theta, 25 phi)",
    )
    sweep.add_argument(
        "--shots", type=_positive_int, default=None, metavar="N",
        help="simulate N shots per basis instead of exact evaluation",
    )
    sweep.add_argument("--seed", type=_nonneg_int, default=0)
    sweep.add_argument(
        "--resamples", type=_positive_int, default=1000,
        help="bootstrap replicates per point for error bars (default 1000)",
    )
    sweep.add_argument(
        "--relations", default="T1,T2,T3,M1,M2,M3,M4", metavar="LABELS",
        help="comma-separated labels from T1,T2,T3,M1,M2,M3,M4",
    )
    _output_flags(sweep)
    sweep.set_defaults(handler=_cmd_sweep)

    verify = sub.add_parser(
        "verify",
        help="fuzz the relations with random states and observables",
        description=(
            "Run seeded random instances through every applicable relation "
            "and tally violations; exits 2 if any bound fails beyond "
            "tolerance."
        ),
    )
    verify.add_argument("--trials", type=_positive_int, default=100)
    verify.add_argument(
        "--dim", type=_int_list, default=(2,), metavar="D[,D...]",
        help="Hilbert-space dimensions to cover (default 2)",
    )
    verify.add_argument(
        "--n-observables", type=_int_list, default=(3,), metavar="N[,N...]",
        help="observable counts to cover (default 3)",
    )
    verify.add_argument("--seed", type=_nonneg_int, default=0)
    verify.add_argument(
        "--pauli", action="store_true",
        help="use the fixed Pauli triple on qubits (sum-form relations only)",
    )
    _output_flags(verify)
    verify.set_defaults(handler=_cmd_verify)

    bounds = sub.add_parser(
        "bounds",
        help="report every bound for one state and observable set",
        description=(
            "Load a state (and optionally observables) from JSON files and "
            "print a report per relation."
        ),
    )
    bounds.add_argument(
        "--state-file", required=True,
        help="JSON state: amplitudes, density, stokes, or bloch form",
    )
    bounds.add_argument(
        "--observables-file", default=None,
        help="JSON observable list; defaults to the Pauli triple for qubits",
    )
    bounds.add_argument(
        "--pairwise", action="store_true",
        help="also report the pairwise product/sum relations per pair",
    )
    _output_flags(bounds)
    bounds.set_defaults(handler=_cmd_bounds)
    return parser


def _output_flags(parser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, metavar="PATH",
                        help="output file (default: stdout)")


def _parse_relations(text: str):
    relations = []
    for raw in text.split(","):
        label = raw.strip().upper()
        if not label:
            continue
        rel = RELATION_BY_LABEL.get(label)
        if rel is None or rel not in SUM_FORM_RELATIONS:
            labels = ",".join(r.label for r in SUM_FORM_RELATIONS)
            raise ValueError(f"unknown relation label {raw!r}; choose from {labels}")
        relations.append(rel)
    if not relations:
        raise ValueError("no relations requested")
    return tuple(relations)


def _cmd_sweep(args) -> int:
    if args.fixed is not None:
        fixed = parse_angle(args.fixed)
    else:
        fixed = 0.0 if args.mode == "theta" else math.pi / 3.0
    steps = args.steps if args.steps is not None else (13 if args.mode == "theta" else 25)
    relations = _parse_relations(args.relations)
    plan = None
    if args.shots is not None:
        plan = ShotPlan(shots_per_basis=args.shots, seed=args.seed)
    spec = SweepSpec(args.mode, fixed, steps, relations, plan)
    rows = run_sweep(spec, resamples=args.resamples)
    metadata = {
        "command": "sweep",
        "mode": args.mode,
        "fixed_angle": f"{fixed:.12g}",
        "steps": steps,
        "relations": ",".join(r.label for r in relations),
        "shots_per_basis": args.shots if args.shots is not None else "exact",
        "seed": args.seed,
    }
    if args.shots is not None:
        metadata["resamples"] = args.resamples
    emit(rows, args.format, args.out, metadata=metadata)
    return 0


def _cmd_verify(args) -> int:
    summary = run_verify(
        args.trials,
        dims=args.dim,
        counts=args.n_observables,
        seed=args.seed,
        use_paulis=args.pauli,
    )
    metadata = {"command": "verify", "seed": args.seed}
    emit(summary, args.format, args.out, metadata=metadata)
    return 2 if summary.has_violations else 0


def _cmd_bounds(args) -> int:
    state = _load_state(args.state_file)
    observables = _load_observables(args.observables_file, state)
    results = evaluate_all(observables, state, include_pairwise=args.pairwise)
    metadata = {
        "command": "bounds",
        "state_file": args.state_file,
        "observables_file": args.observables_file or "pauli",
    }
    emit(results, args.format, args.out, metadata=metadata)
    violated = any(
        isinstance(r, BoundReport) and not r.holds for r in results
    )
    return 2 if violated else 0


def _load_json(path: str) -> dict:
    with open(path) as handle:
        return json.load(handle)


def _complex_entries(data, what: str) -> np.ndarray:
    """Convert nested ``[re, im]`` pairs into a complex array."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValueError(f"{what} must use [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _load_state(path: str) -> QuantumState:
    payload = _load_json(path)
    if not isinstance(payload, dict):
        raise ValueError(f"state file {path} must hold a JSON object")
    if "amplitudes" in payload:
        return PureState(_complex_entries(payload["amplitudes"], "amplitudes"))
    if "density" in payload:
        return DensityMatrix(_complex_entries(payload["density"], "density"))
    if "stokes" in payload:
        values = payload["stokes"]
        if len(values) != 4:
            raise ValueError("stokes form needs [s0, s1, s2, s3]")
        return stokes_to_density(StokesVector(*[float(v) for v in values]))
    if "bloch" in payload:
        angles = payload["bloch"]
        theta = _angle_field(angles.get("theta", 0.0))
        phi = _angle_field(angles.get("phi", 0.0))
        return bloch_to_state(BlochAngles(theta, phi))
    raise ValueError(
        f"state file {path} needs one of: amplitudes, density, stokes, bloch"
    )


def _angle_field(value) -> float:
    if isinstance(value, str):
        return parse_angle(value)
    return float(value)


def _load_observables(path: str | None, state: QuantumState) -> ObservableSet:
    if path is None:
        if state.dim != 2:
            raise ValueError(
                "an observables file is required for states above dimension 2"
            )
        return pauli_triple()
    payload = _load_json(path)
    if isinstance(payload, dict):
        payload = payload.get("observables")
    if not isinstance(payload, list) or not payload:
        raise ValueError(f"observables file {path} must hold a non-empty list")
    return ObservableSet(
        tuple(Observable(_complex_entries(entry, "observable")) for entry in payload)
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: a command is required", file=sys.stderr)
        return 1
    try:
        return args.handler(args)
    except OSError as err:
        print(f"{parser.prog}: error: {err}", file=sys.stderr)
        return 3
    except (ContractError, ValueError) as err:
        print(f"{parser.prog}: error: {err}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
