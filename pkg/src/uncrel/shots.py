"""Finite-shot simulation of Pauli measurements with bootstrap error bars.

A projective Pauli measurement on a qubit is a Bernoulli trial with
``p(+1) = (1 + <sigma>) / 2``, so a counting run is one binomial draw per
basis.  Bound values inherit their uncertainty from the three estimated
expectations; a parametric bootstrap (redraw counts at the estimated p,
re-evaluate the closed forms) propagates it without any linearization.

Every random draw is tied to an explicit seed.  Each basis gets its own
child stream, so adding or dropping a basis never shifts the counts
observed in the others.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .qubit import (
    closed_form_bounds,
    closed_form_lhs,
    closed_form_rhs,
    moments_from_expectations,
    pauli,
)
from .core import QuantumState, expectation
from .relations import Relation, SUM_FORM_RELATIONS

BASIS_ORDER = ("x", "y", "z")
_BASIS_INDEX = {"x": 0, "y": 1, "z": 2}

#: Counting-run length used when a plan does not say otherwise.
DEFAULT_SHOTS_PER_BASIS = 2400

MIN_BOOTSTRAP_RESAMPLES = 100


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic child seed for a (master seed, index path) pair.

    Built on ``numpy.random.SeedSequence`` so distinct paths give
    statistically independent streams.  Seeds are non-negative integers.
    """
    entropy = [int(seed), *[int(k) for k in path]]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


@dataclass(frozen=True)
class ShotPlan:
    """How to run a simulated counting session.

    ``bases`` may be any subset of {'x', 'y', 'z'}; a plain string like
    ``"xz"`` works too.  The same plan always reproduces the same counts.
    """

    shots_per_basis: int = DEFAULT_SHOTS_PER_BASIS
    seed: int = 0
    bases: tuple[str, ...] = BASIS_ORDER

    def __post_init__(self) -> None:
        if int(self.shots_per_basis) < 1:
            raise ValueError(f"shots_per_basis must be >= 1, got {self.shots_per_basis}")
        if int(self.seed) < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        bases = tuple(self.bases)
        if not bases:
            raise ValueError("at least one measurement basis is required")
        unknown = [b for b in bases if b not in _BASIS_INDEX]
        if unknown:
            raise ValueError(f"unknown bases {unknown}, expected subset of {BASIS_ORDER}")
        if len(set(bases)) != len(bases):
            raise ValueError(f"duplicate bases in {bases}")
        object.__setattr__(self, "shots_per_basis", int(self.shots_per_basis))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "bases", bases)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome counts of one basis: ``n_plus`` ups and ``n_minus`` downs."""

    basis: str
    n_plus: int
    n_minus: int

    def __post_init__(self) -> None:
        if self.basis not in _BASIS_INDEX:
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.n_plus < 0 or self.n_minus < 0:
            raise ValueError("outcome counts cannot be negative")
        if self.total < 1:
            raise ValueError("a record needs at least one shot")

    @property
    def total(self) -> int:
        return self.n_plus + self.n_minus


@dataclass(frozen=True)
class EstimateWithError:
    """A point value and its one-standard-deviation error bar."""

    value: float
    std_error: float

    def __post_init__(self) -> None:
        if self.std_error < 0.0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error!r}")


def simulate_counts(state: QuantumState, plan: ShotPlan) -> list[MeasurementRecord]:
    """Draw outcome counts for each planned basis on a qubit state.

    The up-count for basis b is one binomial draw with success probability
    ``(1 + <sigma_b>) / 2``, taken from the child stream keyed by
    ``(plan.seed, basis index)``.  Records come back in plan order.
    """
    if state.dim != 2:
        raise DimensionError(f"shot simulation is for qubits, got dim {state.dim}")
    records = []
    for basis in plan.bases:
        mean = expectation(pauli(basis), state)
        p_up = min(max((1.0 + mean) / 2.0, 0.0), 1.0)
        rng = np.random.default_rng([plan.seed, _BASIS_INDEX[basis]])
        n_plus = int(rng.binomial(plan.shots_per_basis, p_up))
        records.append(
            MeasurementRecord(basis, n_plus, plan.shots_per_basis - n_plus)
        )
    return records


def estimate_expectation(record: MeasurementRecord) -> EstimateWithError:
    """Sample mean of the +/-1 outcomes with its binomial standard error.

    ``std_error = sqrt((1 - value^2) / n)``.  When every shot landed in one
    bin the plug-in error would be zero, which understates the uncertainty
    badly, so the floor ``sqrt(1 / n)`` is used instead.
    """
    n = record.total
    value = (record.n_plus - record.n_minus) / n
    if record.n_plus in (0, n):
        std_error = math.sqrt(1.0 / n)
    else:
        std_error = math.sqrt(max(1.0 - value * value, 0.0) / n)
    return EstimateWithError(value, std_error)


def bootstrap_bounds(
    records: list[MeasurementRecord],
    relations=SUM_FORM_RELATIONS,
    resamples: int = 1000,
    seed: int = 0,
) -> dict[Relation, tuple[EstimateWithError, EstimateWithError]]:
    """Point estimates and bootstrap error bars for closed-form bounds.

    Needs one record per Pauli basis.  Point values plug the estimated
    expectations into the closed forms; they do not depend on ``resamples``.
    Error bars are the sample standard deviations over ``resamples``
    parametric replicates, each drawn by redrawing every basis count from a
    binomial at its estimated success probability.

    Returns a map ``relation -> (lhs estimate, rhs estimate)``; the lhs
    entry repeats the shared sum-of-variances estimate for convenience.
    """
    if resamples < MIN_BOOTSTRAP_RESAMPLES:
        raise ValueError(
            f"resamples must be >= {MIN_BOOTSTRAP_RESAMPLES}, got {resamples}"
        )
    by_basis = {}
    for record in records:
        if record.basis in by_basis:
            raise ValueError(f"duplicate record for basis {record.basis!r}")
        by_basis[record.basis] = record
    missing = [b for b in BASIS_ORDER if b not in by_basis]
    if missing:
        raise ValueError(f"records missing for bases {missing}")

    point = {b: estimate_expectation(by_basis[b]) for b in BASIS_ORDER}
    moments = moments_from_expectations(
        point["x"].value, point["y"].value, point["z"].value
    )
    lhs_point = closed_form_lhs(moments)
    rhs_point = {rel: closed_form_rhs(moments, rel) for rel in relations}

    rng = np.random.default_rng(seed)
    replicate_means = {}
    for basis in BASIS_ORDER:
        n = by_basis[basis].total
        p_up = (1.0 + point[basis].value) / 2.0
        counts = rng.binomial(n, min(max(p_up, 0.0), 1.0), size=resamples)
        replicate_means[basis] = (2.0 * counts - n) / n

    lhs_reps, rhs_reps = closed_form_bounds(
        replicate_means["x"], replicate_means["y"], replicate_means["z"], relations
    )
    lhs_err = float(np.std(lhs_reps, ddof=1))
    lhs_estimate = EstimateWithError(lhs_point, lhs_err)
    return {
        rel: (
            lhs_estimate,
            EstimateWithError(rhs_point[rel], float(np.std(rhs_reps[rel], ddof=1))),
        )
        for rel in relations
    }
