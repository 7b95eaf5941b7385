"""Sweeps over Bloch-sphere grids, randomized verification, and output.

Three entry points sit behind the CLI:

* :func:`run_sweep` walks a one-parameter family of qubit states and
  tabulates the sum-form bounds, either exactly or from simulated counts.
* :func:`run_verify` hammers the relation engine with seeded random states
  and observables and tallies any bound violations beyond tolerance.
* :func:`emit` renders rows, reports, or a verification summary as CSV or
  JSON, to stdout or a file.

Output is deterministic: same inputs and seeds, byte-identical text.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from itertools import combinations
from pathlib import Path

import numpy as np

from ._version import __version__
from .core import PureState, random_observable, random_pure_state
from .qubit import (
    BlochAngles,
    bloch_to_state,
    closed_form_lhs,
    closed_form_rhs,
    moments_from_angles,
    pauli_triple,
)
from .relations import (
    HOLDS_ATOL,
    BoundReport,
    ObservableSet,
    Relation,
    SUM_FORM_RELATIONS,
    SkippedRelation,
    evaluate_all,
    maccone_pati_orthogonal,
)
from .shots import (
    EstimateWithError,
    ShotPlan,
    bootstrap_bounds,
    derive_seed,
    simulate_counts,
)

_TWO_PI = 2.0 * math.pi
_RATIO_T2_OVER_T3 = 2.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class SweepSpec:
    """A one-parameter sweep over Bloch angles.

    ``mode`` selects which angle varies: "theta" walks the polar angle over
    [0, pi] with the azimuth fixed at ``fixed_angle``; "phi" walks the
    azimuth over [0, 2 pi] with the polar angle fixed.  ``steps`` grid
    points are spaced evenly including both endpoints.  With a
    :class:`ShotPlan` attached the sweep simulates counting statistics,
    otherwise it evaluates the closed forms exactly.
    """

    mode: str
    fixed_angle: float
    steps: int
    relations: tuple[Relation, ...] = SUM_FORM_RELATIONS
    shots: ShotPlan | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("theta", "phi"):
            raise ValueError(f"mode must be 'theta' or 'phi', got {self.mode!r}")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")
        fixed_max = _TWO_PI if self.mode == "theta" else math.pi
        if not -1e-12 <= self.fixed_angle <= fixed_max + 1e-12:
            raise ValueError(
                f"fixed angle {self.fixed_angle!r} outside [0, {fixed_max!r}]"
            )
        rels = tuple(self.relations)
        if not rels:
            raise ValueError("at least one relation is required")
        bad = [r for r in rels if r not in SUM_FORM_RELATIONS]
        if bad:
            raise ValueError(
                f"sweeps cover the sum-form relations only, got {[r.value for r in bad]}"
            )
        if len(set(rels)) != len(rels):
            raise ValueError("duplicate relations in sweep spec")
        object.__setattr__(self, "relations", rels)

    def grid(self) -> list[BlochAngles]:
        """The concrete (theta, phi) points, in sweep order."""
        if self.mode == "theta":
            return [
                BlochAngles(t, self.fixed_angle)
                for t in np.linspace(0.0, math.pi, self.steps)
            ]
        return [
            BlochAngles(self.fixed_angle, p)
            for p in np.linspace(0.0, _TWO_PI, self.steps)
        ]


@dataclass(frozen=True)
class OutputRow:
    """One sweep point: angles, shared lhs, and per-relation bounds.

    Exact rows carry ``std_error`` 0 everywhere and ``estimated`` False.
    On estimated rows a ``holds`` flag of False is a statistical statement
    about noisy point values, not a claimed violation of theory.
    """

    theta: float
    phi: float
    lhs: EstimateWithError
    bounds: dict[Relation, EstimateWithError]
    holds: dict[Relation, bool]
    estimated: bool


def run_sweep(spec: SweepSpec, *, resamples: int = 1000) -> list[OutputRow]:
    """Evaluate the requested bounds at every grid point of the sweep.

    Exact sweeps use the closed forms directly.  Simulated sweeps draw
    counts for each point from a child seed of ``spec.shots.seed`` keyed by
    the point index, so any sub-grid of points reproduces the full sweep's
    values, then bootstrap ``resamples`` replicates for the error bars.
    """
    rows = []
    for index, angles in enumerate(spec.grid()):
        if spec.shots is None:
            rows.append(_exact_row(angles, spec.relations))
        else:
            rows.append(
                _simulated_row(angles, spec, index, resamples)
            )
    return rows


def _exact_row(angles: BlochAngles, relations) -> OutputRow:
    moments = moments_from_angles(angles)
    lhs = closed_form_lhs(moments)
    bounds = {}
    holds = {}
    for rel in relations:
        rhs = closed_form_rhs(moments, rel)
        bounds[rel] = EstimateWithError(rhs, 0.0)
        holds[rel] = lhs - rhs >= -HOLDS_ATOL
    return OutputRow(
        angles.theta, angles.phi, EstimateWithError(lhs, 0.0), bounds, holds, False
    )


def _simulated_row(
    angles: BlochAngles, spec: SweepSpec, index: int, resamples: int
) -> OutputRow:
    plan = replace(spec.shots, seed=derive_seed(spec.shots.seed, index))
    records = simulate_counts(bloch_to_state(angles), plan)
    estimates = bootstrap_bounds(
        records,
        spec.relations,
        resamples=resamples,
        seed=derive_seed(spec.shots.seed, index, 1),
    )
    lhs = next(iter(estimates.values()))[0]
    bounds = {rel: pair[1] for rel, pair in estimates.items()}
    holds = {
        rel: lhs.value - bounds[rel].value >= -HOLDS_ATOL for rel in spec.relations
    }
    return OutputRow(angles.theta, angles.phi, lhs, bounds, holds, True)


# -- randomized verification --------------------------------------------------

@dataclass
class RelationTally:
    """Aggregate outcome of one relation across a verification campaign.

    ``min_slack_witness`` pins down the near-tightness instance: the trial
    coordinates that produced the smallest slack seen for this relation.
    """

    evaluated: int = 0
    violations: int = 0
    min_slack: float = math.inf
    min_slack_witness: dict | None = None

    @property
    def held(self) -> int:
        return self.evaluated - self.violations


@dataclass
class VerificationSummary:
    """What a randomized campaign saw, with enough detail to reproduce.

    ``violation_witnesses`` holds reproduction data (seeds, dimensions,
    indices, slack) for up to 20 violating instances.  ``notes`` collects
    observations that are tracked but deliberately not asserted: instances
    where the pair-sum bound with cross term is less tight than the
    pair-difference bound, and instances where the total-sum bound fails
    to dominate the other three.  Neither is a violation; the dominance
    property is specific to the Pauli triple on qubits and does not carry
    over to arbitrary observable sets.
    """

    trials: int
    dims: tuple[int, ...]
    counts: tuple[int, ...]
    seed: int
    use_paulis: bool
    total_instances: int = 0
    tallies: dict[Relation, RelationTally] = field(default_factory=dict)
    violation_witnesses: list[dict] = field(default_factory=list)
    ratio_max_error: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def has_violations(self) -> bool:
        return any(t.violations for t in self.tallies.values())

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "dims": list(self.dims),
            "counts": list(self.counts),
            "seed": self.seed,
            "use_paulis": self.use_paulis,
            "total_instances": self.total_instances,
            "has_violations": self.has_violations,
            "ratio_max_error": self.ratio_max_error,
            "tallies": {
                rel.value: {
                    "label": rel.label,
                    "evaluated": tally.evaluated,
                    "held": tally.held,
                    "violations": tally.violations,
                    "min_slack": tally.min_slack,
                    "min_slack_witness": tally.min_slack_witness,
                }
                for rel, tally in self.tallies.items()
            },
            "violation_witnesses": self.violation_witnesses,
            "notes": self.notes,
        }


def run_verify(
    trials: int,
    dims: tuple[int, ...] = (2,),
    counts: tuple[int, ...] = (3,),
    seed: int = 0,
    *,
    use_paulis: bool = False,
) -> VerificationSummary:
    """Evaluate every applicable relation on seeded random instances.

    One instance is a random pure state plus ``n`` random observables for
    each combination of ``trials`` x ``dims`` x ``counts``; all seeds are
    derived from ``seed`` so campaigns are reproducible.  With
    ``use_paulis`` the observables are the fixed Pauli triple (dims and
    counts must then be ``(2,)`` and ``(3,)``) and only the sum-form
    relations run, which keeps very large state counts affordable.

    Random-observable campaigns also evaluate the pairwise relations.
    Above dimension 2 the orthogonal-state sum bound gets a random
    orthogonal companion built by Gram-Schmidt, since no canonical choice
    exists there.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    dims = tuple(int(d) for d in dims)
    counts = tuple(int(n) for n in counts)
    if use_paulis and (dims != (2,) or counts != (3,)):
        raise ValueError("Pauli campaigns fix dims=(2,) and counts=(3,)")
    summary = VerificationSummary(trials, dims, counts, seed, use_paulis)
    tallies = summary.tallies
    pauli_set = pauli_triple() if use_paulis else None

    for trial in range(trials):
        for dim in dims:
            for n in counts:
                instance_key = (trial, dim, n)
                state = random_pure_state(dim, derive_seed(seed, trial, dim, n, 0))
                if use_paulis:
                    obs_set = pauli_set
                else:
                    obs_set = ObservableSet(
                        tuple(
                            random_observable(dim, derive_seed(seed, trial, dim, n, 1 + i))
                            for i in range(n)
                        )
                    )
                results = evaluate_all(
                    obs_set, state, include_pairwise=not use_paulis
                )
                if not use_paulis and dim > 2:
                    results.extend(
                        _orthogonal_reports(obs_set, state, derive_seed(seed, trial, dim, n, 99))
                    )
                summary.total_instances += 1
                _digest_instance(summary, tallies, instance_key, results)
    return summary


def _orthogonal_reports(
    obs_set: ObservableSet, state: PureState, perp_seed: int
) -> list[BoundReport]:
    perp = _random_orthogonal(state, perp_seed)
    reports = []
    for i, j in combinations(range(obs_set.count), 2):
        rep = maccone_pati_orthogonal(obs_set[i], obs_set[j], state, perp)
        reports.append(replace(rep, pair=(i, j)))
    return reports


def _random_orthogonal(state: PureState, seed: int) -> PureState:
    """A seeded random state orthogonal to ``state`` (dimension >= 2)."""
    psi = state.amplitudes
    rng = np.random.default_rng(seed)
    while True:
        v = rng.standard_normal(psi.size) + 1j * rng.standard_normal(psi.size)
        v = v - complex(np.vdot(psi, v)) * psi
        norm = float(np.linalg.norm(v))
        if norm > 1e-6:
            return PureState(v / norm)


def _digest_instance(summary, tallies, instance_key, results) -> None:
    by_relation = {}
    for item in results:
        if isinstance(item, SkippedRelation):
            continue
        tally = tallies.setdefault(item.relation, RelationTally())
        tally.evaluated += 1
        if item.slack < tally.min_slack:
            tally.min_slack = item.slack
            trial, dim, n = instance_key
            tally.min_slack_witness = {
                "trial": trial,
                "dim": dim,
                "n_observables": n,
                "pair": list(item.pair) if item.pair else None,
                "lhs": item.lhs,
                "rhs": item.rhs,
            }
        if not item.holds:
            tally.violations += 1
            if len(summary.violation_witnesses) < 20:
                trial, dim, n = instance_key
                summary.violation_witnesses.append(
                    {
                        "relation": item.relation.value,
                        "trial": trial,
                        "dim": dim,
                        "n_observables": n,
                        "pair": list(item.pair) if item.pair else None,
                        "lhs": item.lhs,
                        "rhs": item.rhs,
                        "slack": item.slack,
                    }
                )
        if item.pair is None:
            by_relation[item.relation] = item

    t2 = by_relation.get(Relation.TRIPLE_COMMUTATOR)
    t3 = by_relation.get(Relation.TRIPLE_PAIRWISE)
    if t2 is not None and t3 is not None and t3.rhs > 1e-12:
        error = abs(t2.rhs - _RATIO_T2_OVER_T3 * t3.rhs)
        if error > summary.ratio_max_error:
            summary.ratio_max_error = error

    m2 = by_relation.get(Relation.SUM_MINUS)
    m3 = by_relation.get(Relation.CHEN_FEI)
    if m2 is not None and m3 is not None and m3.rhs < m2.rhs - 1e-12:
        note = summary.notes.setdefault(
            "cross_term_bound_below_pair_difference", {"count": 0, "examples": []}
        )
        note["count"] += 1
        if len(note["examples"]) < 3:
            trial, dim, n = instance_key
            note["examples"].append(
                {"trial": trial, "dim": dim, "n_observables": n,
                 "m2_rhs": m2.rhs, "m3_rhs": m3.rhs}
            )

    m4 = by_relation.get(Relation.SONG)
    others = [
        r.rhs
        for r in (
            by_relation.get(Relation.SUM_PLUS),
            by_relation.get(Relation.SUM_MINUS),
            by_relation.get(Relation.CHEN_FEI),
        )
        if r is not None
    ]
    if m4 is not None and others and m4.rhs < max(others) - HOLDS_ATOL:
        trial, dim, n = instance_key
        note = summary.notes.setdefault(
            "total_sum_bound_not_dominant", {"count": 0, "by_dim": {}, "examples": []}
        )
        note["count"] += 1
        note["by_dim"][dim] = note["by_dim"].get(dim, 0) + 1
        if len(note["examples"]) < 3:
            note["examples"].append(
                {"trial": trial, "dim": dim, "n_observables": n,
                 "m4_rhs": m4.rhs, "best_other_rhs": max(others)}
            )


# -- serialization ------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _quant(value: float) -> float:
    # JSON carries the same 12 significant digits as the CSV text.
    return float(_fmt(value))


def _base_metadata(metadata: dict | None) -> dict:
    merged = {"generated_by": f"uncrel {__version__}"}
    if metadata:
        merged.update(metadata)
    return merged


def emit(data, fmt: str = "csv", destination=None, *, metadata: dict | None = None) -> str:
    """Render sweep rows, bound reports, or a verification summary.

    Args:
        data: a list of :class:`OutputRow`, a list of
            :class:`BoundReport` / :class:`SkippedRelation`, or a
            :class:`VerificationSummary`.
        fmt: "csv" or "json".  CSV floats get 12 significant digits and
            metadata travels in leading ``#`` comment lines; JSON mirrors
            the same fields and the same rounding.
        destination: file path, or None for stdout.
        metadata: extra key/value pairs recorded alongside the data.

    Returns the rendered text (also written to the destination).  A failed
    write raises ``OSError`` naming the path.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    meta = _base_metadata(metadata)
    if isinstance(data, VerificationSummary):
        text = _render_summary(data, fmt, meta)
    elif isinstance(data, list) and all(isinstance(r, OutputRow) for r in data):
        text = _render_rows(data, fmt, meta)
    elif isinstance(data, list) and all(
        isinstance(r, (BoundReport, SkippedRelation)) for r in data
    ):
        text = _render_reports(data, fmt, meta)
    else:
        raise TypeError("emit expects OutputRow lists, report lists, or a summary")
    _write_text(text, destination)
    return text


def _write_text(text: str, destination) -> None:
    if destination is None:
        sys.stdout.write(text)
        return
    try:
        Path(destination).write_text(text)
    except OSError as err:
        raise OSError(f"cannot write output to {destination}: {err}") from err


def _comment_block(meta: dict) -> str:
    return "".join(f"# {key} = {value}\n" for key, value in meta.items())


def _json_dump(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _render_rows(rows: list[OutputRow], fmt: str, meta: dict) -> str:
    if not rows:
        raise ValueError("no rows to emit")
    relations = list(rows[0].bounds.keys())
    if fmt == "json":
        payload = {
            "metadata": meta,
            "rows": [
                {
                    "theta": _quant(row.theta),
                    "phi": _quant(row.phi),
                    "estimated": row.estimated,
                    "lhs": {
                        "value": _quant(row.lhs.value),
                        "std_error": _quant(row.lhs.std_error),
                    },
                    "bounds": {
                        rel.label: {
                            "value": _quant(row.bounds[rel].value),
                            "std_error": _quant(row.bounds[rel].std_error),
                            "holds": row.holds[rel],
                        }
                        for rel in relations
                    },
                }
                for row in rows
            ],
        }
        return _json_dump(payload)
    buffer = io.StringIO()
    buffer.write(_comment_block(meta))
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["theta", "phi", "lhs", "lhs_err"]
    for rel in relations:
        header.extend([rel.label, f"{rel.label}_err"])
    header.extend(f"{rel.label}_holds" for rel in relations)
    writer.writerow(header)
    for row in rows:
        record = [_fmt(row.theta), _fmt(row.phi), _fmt(row.lhs.value), _fmt(row.lhs.std_error)]
        for rel in relations:
            record.extend([_fmt(row.bounds[rel].value), _fmt(row.bounds[rel].std_error)])
        record.extend("1" if row.holds[rel] else "0" for rel in relations)
        writer.writerow(record)
    return buffer.getvalue()


def _render_reports(reports, fmt: str, meta: dict) -> str:
    evaluated = [r for r in reports if isinstance(r, BoundReport)]
    skipped = [r for r in reports if isinstance(r, SkippedRelation)]
    if fmt == "json":
        payload = {
            "metadata": meta,
            "reports": [
                {
                    "relation": rep.relation.value,
                    "label": rep.relation.label,
                    "pair": list(rep.pair) if rep.pair else None,
                    "lhs": _quant(rep.lhs),
                    "rhs": _quant(rep.rhs),
                    "slack": _quant(rep.slack),
                    "mid": None if rep.mid is None else _quant(rep.mid),
                    "holds": rep.holds,
                }
                for rep in evaluated
            ],
            "skipped": [
                {"relation": rep.relation.value, "reason": rep.reason}
                for rep in skipped
            ],
        }
        return _json_dump(payload)
    buffer = io.StringIO()
    buffer.write(_comment_block(meta))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["relation", "label", "pair", "lhs", "rhs", "slack", "mid", "holds", "status", "reason"]
    )
    for rep in evaluated:
        writer.writerow(
            [
                rep.relation.value,
                rep.relation.label,
                "" if rep.pair is None else f"{rep.pair[0]}-{rep.pair[1]}",
                _fmt(rep.lhs),
                _fmt(rep.rhs),
                _fmt(rep.slack),
                "" if rep.mid is None else _fmt(rep.mid),
                "1" if rep.holds else "0",
                "ok",
                "",
            ]
        )
    for rep in skipped:
        writer.writerow(
            [rep.relation.value, rep.relation.label, "", "", "", "", "", "", "skipped", rep.reason]
        )
    return buffer.getvalue()


def _render_summary(summary: VerificationSummary, fmt: str, meta: dict) -> str:
    if fmt == "json":
        return _json_dump({"metadata": meta, "summary": summary.to_dict()})
    buffer = io.StringIO()
    buffer.write(_comment_block(meta))
    buffer.write(
        "# campaign: trials={} dims={} counts={} seed={} use_paulis={}\n".format(
            summary.trials,
            list(summary.dims),
            list(summary.counts),
            summary.seed,
            summary.use_paulis,
        )
    )
    buffer.write(f"# total_instances = {summary.total_instances}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["relation", "label", "evaluated", "held", "violations", "min_slack"])
    for rel in Relation:
        tally = summary.tallies.get(rel)
        if tally is None:
            continue
        writer.writerow(
            [
                rel.value,
                rel.label,
                tally.evaluated,
                tally.held,
                tally.violations,
                _fmt(tally.min_slack),
            ]
        )
    return buffer.getvalue()
