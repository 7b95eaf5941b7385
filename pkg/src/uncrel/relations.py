"""Variance uncertainty relations: products, sums, and N-observable bounds.

Each relation compares a measured left-hand side against a state-dependent
lower bound and reports the slack between them.  A relation "holds" when the
slack is no worse than ``-HOLDS_ATOL``; exact theory can sit right on the
bound, so a little room for round-off is required.

Two families are covered.  Pairwise relations bound either the product of
two variances (Robertson) or their sum (the two Maccone-Pati forms, pure
states only).  Sum-form relations bound the total variance of three or more
observables through pair combinations, commutator means, or the variance of
the summed observable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum, unique
from itertools import combinations
from typing import Callable

import numpy as np

from . import core
from .core import DensityMatrix, Observable, PureState, QuantumState
from .errors import (
    DimensionError,
    OrthogonalityError,
    UnsupportedCountError,
    UnsupportedStateError,
)

# A report may undershoot its bound by this much before it counts as a
# violation; anything worse is a genuine failure, not round-off.
HOLDS_ATOL = 1e-9

_SQRT3 = math.sqrt(3.0)


@unique
class Relation(Enum):
    """The supported relations, with the short labels used in reports."""

    ROBERTSON = "robertson"
    MACCONE_PATI_ORTHOGONAL = "mp_orthogonal"
    MACCONE_PATI_DEVIATION = "mp_deviation"
    TRIPLE_SUM = "triple_sum"
    TRIPLE_COMMUTATOR = "triple_commutator"
    TRIPLE_PAIRWISE = "triple_pairwise"
    SUM_PLUS = "sum_plus"
    SUM_MINUS = "sum_minus"
    CHEN_FEI = "chen_fei"
    SONG = "song"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def pairwise(self) -> bool:
        return self in PAIRWISE_RELATIONS


_LABELS = {
    Relation.ROBERTSON: "R",
    Relation.MACCONE_PATI_ORTHOGONAL: "MPO",
    Relation.MACCONE_PATI_DEVIATION: "MPD",
    Relation.TRIPLE_SUM: "T1",
    Relation.TRIPLE_COMMUTATOR: "T2",
    Relation.TRIPLE_PAIRWISE: "T3",
    Relation.SUM_PLUS: "M1",
    Relation.SUM_MINUS: "M2",
    Relation.CHEN_FEI: "M3",
    Relation.SONG: "M4",
}

#: Sum-form relations in canonical report order.
SUM_FORM_RELATIONS = (
    Relation.TRIPLE_SUM,
    Relation.TRIPLE_COMMUTATOR,
    Relation.TRIPLE_PAIRWISE,
    Relation.SUM_PLUS,
    Relation.SUM_MINUS,
    Relation.CHEN_FEI,
    Relation.SONG,
)

PAIRWISE_RELATIONS = (
    Relation.ROBERTSON,
    Relation.MACCONE_PATI_ORTHOGONAL,
    Relation.MACCONE_PATI_DEVIATION,
)

RELATION_BY_LABEL = {r.label: r for r in Relation}


@dataclass(frozen=True)
class BoundReport:
    """One evaluated relation instance.

    ``slack = lhs - rhs``; ``holds`` is ``slack >= -HOLDS_ATOL``.  ``mid``
    carries the pairwise-product middle term of the chained triple relation
    and is ``None`` elsewhere.  ``pair`` identifies the observable indices
    for pairwise relations.
    """

    relation: Relation
    lhs: float
    rhs: float
    slack: float
    holds: bool
    mid: float | None = None
    pair: tuple[int, int] | None = None


@dataclass(frozen=True)
class SkippedRelation:
    """Marker for a relation that does not apply to the given inputs."""

    relation: Relation
    reason: str


def _report(
    relation: Relation,
    lhs: float,
    rhs: float,
    *,
    mid: float | None = None,
    pair: tuple[int, int] | None = None,
) -> BoundReport:
    slack = lhs - rhs
    return BoundReport(relation, lhs, rhs, slack, slack >= -HOLDS_ATOL, mid, pair)


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """An ordered collection of two or more same-dimension observables."""

    observables: tuple[Observable, ...]

    def __post_init__(self) -> None:
        obs = tuple(self.observables)
        if len(obs) < 2:
            raise UnsupportedCountError(
                f"an observable set needs at least 2 members, got {len(obs)}"
            )
        if any(not isinstance(o, Observable) for o in obs):
            raise TypeError("observable set members must be Observable instances")
        dims = {o.dim for o in obs}
        if len(dims) > 1:
            raise DimensionError(f"observables have mixed dimensions: {sorted(dims)}")
        object.__setattr__(self, "observables", obs)

    @property
    def dim(self) -> int:
        return self.observables[0].dim

    @property
    def count(self) -> int:
        return len(self.observables)

    def __len__(self) -> int:
        return len(self.observables)

    def __iter__(self):
        return iter(self.observables)

    def __getitem__(self, index: int) -> Observable:
        return self.observables[index]


# -- shared raw-array plumbing ------------------------------------------------

def _accessors(
    state: QuantumState,
) -> tuple[
    Callable[[np.ndarray], float],
    Callable[[np.ndarray], float],
    Callable[[np.ndarray, np.ndarray], complex],
]:
    """Bind (expect, var, comm) closures to the underlying state array."""
    if isinstance(state, PureState):
        psi = state.amplitudes
        return (
            lambda m: core._expect_vec(m, psi),
            lambda m: core._var_vec(m, psi),
            lambda a, b: core._comm_vec(a, b, psi),
        )
    if isinstance(state, DensityMatrix):
        rho = state.matrix
        return (
            lambda m: core._expect_rho(m, rho),
            lambda m: core._var_rho(m, rho),
            lambda a, b: core._comm_rho(a, b, rho),
        )
    raise TypeError(f"not a quantum state: {state!r}")


def _pair_variances(
    var: Callable[[np.ndarray], float], mats: list[np.ndarray], sign: float
) -> list[float]:
    return [var(mats[i] + sign * mats[j]) for i, j in combinations(range(len(mats)), 2)]


def _require_pure(state: QuantumState, relation: Relation) -> PureState:
    if isinstance(state, PureState):
        return state
    if isinstance(state, DensityMatrix):
        raise UnsupportedStateError(
            f"{relation.value} is defined for pure states only"
        )
    raise TypeError(f"not a quantum state: {state!r}")


# -- pairwise relations -------------------------------------------------------

def robertson(a: Observable, b: Observable, state: QuantumState) -> BoundReport:
    """Product bound: Var(A) Var(B) >= |<[A, B]>/2|^2."""
    core._check_same_dim(a.dim, b.dim, state.dim)
    _, var, comm = _accessors(state)
    lhs = var(a.matrix) * var(b.matrix)
    rhs = (0.5 * abs(comm(a.matrix, b.matrix))) ** 2
    return _report(Relation.ROBERTSON, lhs, rhs)


def maccone_pati_orthogonal(
    a: Observable,
    b: Observable,
    psi: PureState,
    psi_perp: PureState,
) -> BoundReport:
    """Sum bound built from a state orthogonal to ``psi``.

    rhs = s*i<[A,B]> + |<psi|A + s*iB|psi_perp>|^2 with the sign ``s``
    chosen so the commutator term is non-negative.  When the commutator
    expectation is exactly zero both signs are evaluated and the larger
    bound is reported.  Pure states only; ``psi_perp`` must be orthogonal
    to ``psi`` within 1e-10.
    """
    psi = _require_pure(psi, Relation.MACCONE_PATI_ORTHOGONAL)
    if not isinstance(psi_perp, PureState):
        raise TypeError(f"psi_perp must be a PureState, got {psi_perp!r}")
    core._check_same_dim(a.dim, b.dim, psi.dim, psi_perp.dim)
    v = psi.amplitudes
    v_perp = psi_perp.amplitudes
    overlap = abs(complex(np.vdot(v, v_perp)))
    if overlap > 1e-10:
        raise OrthogonalityError(
            f"psi_perp has overlap {overlap!r} with psi, expected orthogonal"
        )
    _, var, comm = _accessors(psi)
    lhs = var(a.matrix) + var(b.matrix)
    # i<[A,B]> is real for Hermitian A, B.
    signed_comm = float((1j * comm(a.matrix, b.matrix)).real)

    def branch(sign: float) -> float:
        cross = complex(np.vdot(v, (a.matrix + sign * 1j * b.matrix) @ v_perp))
        return sign * signed_comm + abs(cross) ** 2

    if signed_comm > 0.0:
        rhs = branch(1.0)
    elif signed_comm < 0.0:
        rhs = branch(-1.0)
    else:
        rhs = max(branch(1.0), branch(-1.0))
    return _report(Relation.MACCONE_PATI_ORTHOGONAL, lhs, rhs)


def maccone_pati_deviation(
    a: Observable, b: Observable, psi: PureState
) -> BoundReport:
    """Sum bound through the deviation direction of A + B.

    rhs = |<d|(A+B)|psi>|^2 / 2 where ``d`` is the normalized deviation
    state of ``A + B``; this equals half the variance of ``A + B``.  When
    ``psi`` is an eigenstate of ``A + B`` the bound degenerates to zero.
    """
    psi = _require_pure(psi, Relation.MACCONE_PATI_DEVIATION)
    core._check_same_dim(a.dim, b.dim, psi.dim)
    _, var, _ = _accessors(psi)
    lhs = var(a.matrix) + var(b.matrix)
    total = Observable(a.matrix + b.matrix)
    _, direction = core.deviation_state(total, psi)
    if direction is None:
        rhs = 0.0
    else:
        cross = complex(
            np.vdot(direction.amplitudes, total.matrix @ psi.amplitudes)
        )
        rhs = 0.5 * abs(cross) ** 2
    return _report(Relation.MACCONE_PATI_DEVIATION, lhs, rhs)


# -- triple relations ---------------------------------------------------------

def _triple_prep(a, b, c, state):
    core._check_same_dim(a.dim, b.dim, c.dim, state.dim)
    _, var, comm = _accessors(state)
    mats = [a.matrix, b.matrix, c.matrix]
    return var, comm, mats


def triple_sum(
    a: Observable, b: Observable, c: Observable, state: QuantumState
) -> BoundReport:
    """Total-variance bound mixing Var(A+B+C) with the summed commutators.

    rhs = Var(A+B+C)/3 + (sqrt(3)/3) |<[A,B]> + <[B,C]> + <[C,A]>| with the
    magnitude taken of the complex sum.
    """
    var, comm, mats = _triple_prep(a, b, c, state)
    lhs = var(mats[0]) + var(mats[1]) + var(mats[2])
    total_var = var(mats[0] + mats[1] + mats[2])
    comm_sum = comm(mats[0], mats[1]) + comm(mats[1], mats[2]) + comm(mats[2], mats[0])
    rhs = total_var / 3.0 + (_SQRT3 / 3.0) * abs(comm_sum)
    return _report(Relation.TRIPLE_SUM, lhs, rhs)


def triple_commutator(
    a: Observable, b: Observable, c: Observable, state: QuantumState
) -> BoundReport:
    """Commutator-only bound: rhs = (sqrt(3)/3) * sum of |<[.,.]>|."""
    var, comm, mats = _triple_prep(a, b, c, state)
    lhs = var(mats[0]) + var(mats[1]) + var(mats[2])
    mags = (
        abs(comm(mats[0], mats[1]))
        + abs(comm(mats[1], mats[2]))
        + abs(comm(mats[2], mats[0]))
    )
    rhs = (_SQRT3 / 3.0) * mags
    return _report(Relation.TRIPLE_COMMUTATOR, lhs, rhs)


def triple_pairwise(
    a: Observable, b: Observable, c: Observable, state: QuantumState
) -> BoundReport:
    """Chained bound lhs >= mid >= rhs through pairwise deviation products.

    ``mid`` is dA*dB + dB*dC + dC*dA (products of standard deviations) and
    rhs is half the summed commutator magnitudes.  The report keeps the
    middle term so callers can check both links of the chain.
    """
    var, comm, mats = _triple_prep(a, b, c, state)
    variances = [var(m) for m in mats]
    lhs = sum(variances)
    da, db, dc = (math.sqrt(x) for x in variances)
    mid = da * db + db * dc + dc * da
    mags = (
        abs(comm(mats[0], mats[1]))
        + abs(comm(mats[1], mats[2]))
        + abs(comm(mats[2], mats[0]))
    )
    rhs = 0.5 * mags
    return _report(Relation.TRIPLE_PAIRWISE, lhs, rhs, mid=mid)


# -- N-observable relations ---------------------------------------------------

def _nary_prep(observables: ObservableSet, state: QuantumState):
    core._check_same_dim(observables.dim, state.dim)
    _, var, _ = _accessors(state)
    mats = [o.matrix for o in observables]
    return var, mats


def sum_plus(observables: ObservableSet, state: QuantumState) -> BoundReport:
    """Pair-sum bound: rhs = sum over i<j of Var(A_i + A_j) / (2(N-1))."""
    var, mats = _nary_prep(observables, state)
    lhs = sum(var(m) for m in mats)
    rhs = sum(_pair_variances(var, mats, +1.0)) / (2.0 * (len(mats) - 1))
    return _report(Relation.SUM_PLUS, lhs, rhs)


def sum_minus(observables: ObservableSet, state: QuantumState) -> BoundReport:
    """Pair-difference bound: rhs = sum over i<j of Var(A_i - A_j) / (2(N-1))."""
    var, mats = _nary_prep(observables, state)
    lhs = sum(var(m) for m in mats)
    rhs = sum(_pair_variances(var, mats, -1.0)) / (2.0 * (len(mats) - 1))
    return _report(Relation.SUM_MINUS, lhs, rhs)


def chen_fei(observables: ObservableSet, state: QuantumState) -> BoundReport:
    """Pair-sum bound with a cross term, defined for N >= 3.

    rhs = S2/(N-2) - S1^2/((N-1)^2 (N-2)) where S2 sums Var(A_i + A_j) and
    S1 sums the standard deviations of the same pair sums.
    """
    if observables.count < 3:
        raise UnsupportedCountError(
            f"this relation needs at least 3 observables, got {observables.count}"
        )
    var, mats = _nary_prep(observables, state)
    n = len(mats)
    lhs = sum(var(m) for m in mats)
    pair_vars = _pair_variances(var, mats, +1.0)
    s2 = sum(pair_vars)
    s1 = sum(math.sqrt(x) for x in pair_vars)
    rhs = s2 / (n - 2) - s1 * s1 / ((n - 1) ** 2 * (n - 2))
    return _report(Relation.CHEN_FEI, lhs, rhs)


def song(observables: ObservableSet, state: QuantumState) -> BoundReport:
    """Total-sum bound: Var of the summed observable plus a difference term.

    rhs = Var(sum A_i)/N + 2 D^2 / (N^2 (N-1)) where D sums the standard
    deviations of all pairwise differences A_i - A_j, i < j.
    """
    var, mats = _nary_prep(observables, state)
    n = len(mats)
    lhs = sum(var(m) for m in mats)
    total_var = var(sum(mats[1:], start=mats[0]))
    diff_stds = sum(math.sqrt(x) for x in _pair_variances(var, mats, -1.0))
    rhs = total_var / n + 2.0 * diff_stds * diff_stds / (n * n * (n - 1))
    return _report(Relation.SONG, lhs, rhs)


# -- batch evaluation ---------------------------------------------------------

def evaluate_all(
    observables: ObservableSet,
    state: QuantumState,
    *,
    include_pairwise: bool = False,
) -> list[BoundReport | SkippedRelation]:
    """Evaluate every applicable relation on one observable set and state.

    Sum-form relations come first in canonical order, with explicit
    :class:`SkippedRelation` markers where the observable count rules one
    out.  With ``include_pairwise`` the pairwise relations follow, one
    report per observable pair; the Maccone-Pati forms are skipped for
    mixed states, and the orthogonal form is additionally skipped above
    dimension 2 where no canonical orthogonal state exists.

    All sum-form reports share one lhs value (the total of the single
    variances), computed once.
    """
    core._check_same_dim(observables.dim, state.dim)
    _, var, comm = _accessors(state)
    mats = [o.matrix for o in observables]
    n = len(mats)

    variances = [var(m) for m in mats]
    lhs = sum(variances)
    plus_vars = _pair_variances(var, mats, +1.0)
    minus_vars = _pair_variances(var, mats, -1.0)
    total_var = var(sum(mats[1:], start=mats[0]))

    results: list[BoundReport | SkippedRelation] = []

    if n == 3:
        comms = [
            comm(mats[0], mats[1]),
            comm(mats[1], mats[2]),
            comm(mats[2], mats[0]),
        ]
        mags = sum(abs(c) for c in comms)
        results.append(
            _report(
                Relation.TRIPLE_SUM,
                lhs,
                total_var / 3.0 + (_SQRT3 / 3.0) * abs(sum(comms)),
            )
        )
        results.append(
            _report(Relation.TRIPLE_COMMUTATOR, lhs, (_SQRT3 / 3.0) * mags)
        )
        stds = [math.sqrt(x) for x in variances]
        mid = stds[0] * stds[1] + stds[1] * stds[2] + stds[2] * stds[0]
        results.append(_report(Relation.TRIPLE_PAIRWISE, lhs, 0.5 * mags, mid=mid))
    else:
        reason = f"needs exactly 3 observables, got {n}"
        for rel in (
            Relation.TRIPLE_SUM,
            Relation.TRIPLE_COMMUTATOR,
            Relation.TRIPLE_PAIRWISE,
        ):
            results.append(SkippedRelation(rel, reason))

    results.append(
        _report(Relation.SUM_PLUS, lhs, sum(plus_vars) / (2.0 * (n - 1)))
    )
    results.append(
        _report(Relation.SUM_MINUS, lhs, sum(minus_vars) / (2.0 * (n - 1)))
    )

    if n >= 3:
        s1 = sum(math.sqrt(x) for x in plus_vars)
        rhs = sum(plus_vars) / (n - 2) - s1 * s1 / ((n - 1) ** 2 * (n - 2))
        results.append(_report(Relation.CHEN_FEI, lhs, rhs))
    else:
        results.append(
            SkippedRelation(Relation.CHEN_FEI, f"needs at least 3 observables, got {n}")
        )

    diff_stds = sum(math.sqrt(x) for x in minus_vars)
    results.append(
        _report(
            Relation.SONG,
            lhs,
            total_var / n + 2.0 * diff_stds * diff_stds / (n * n * (n - 1)),
        )
    )

    if include_pairwise:
        results.extend(_pairwise_reports(observables, state))
    return results


def _pairwise_reports(
    observables: ObservableSet, state: QuantumState
) -> list[BoundReport | SkippedRelation]:
    results: list[BoundReport | SkippedRelation] = []
    pairs = list(combinations(range(observables.count), 2))
    for i, j in pairs:
        results.append(replace(robertson(observables[i], observables[j], state), pair=(i, j)))
    if not isinstance(state, PureState):
        results.append(
            SkippedRelation(
                Relation.MACCONE_PATI_ORTHOGONAL, "defined for pure states only"
            )
        )
        results.append(
            SkippedRelation(
                Relation.MACCONE_PATI_DEVIATION, "defined for pure states only"
            )
        )
        return results
    if observables.dim == 2:
        perp = core.orthogonal_qubit(state)
        for i, j in pairs:
            results.append(
                replace(
                    maccone_pati_orthogonal(observables[i], observables[j], state, perp),
                    pair=(i, j),
                )
            )
    else:
        results.append(
            SkippedRelation(
                Relation.MACCONE_PATI_ORTHOGONAL,
                "no canonical orthogonal state above dimension 2",
            )
        )
    for i, j in pairs:
        results.append(
            replace(maccone_pati_deviation(observables[i], observables[j], state), pair=(i, j))
        )
    return results
