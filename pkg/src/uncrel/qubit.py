"""Closed forms for a qubit measured along the three Pauli axes.

For a qubit all nine bounds reduce to algebra in the Pauli expectations
``(ex, ey, ez)``.  This module derives those moments from Bloch angles,
raw expectation triples, or Stokes parameters, and evaluates the sum-form
bounds without touching matrices.  The matrix engine in
:mod:`uncrel.relations` computes the same numbers the long way round; the
two routes cross-check each other in the test suite.

For every state the sum of the three Pauli variances is ``3 - v`` with
``v = ex^2 + ey^2 + ez^2``, so pure states (``v = 1``) pin the left-hand
side at exactly 2 no matter where they sit on the Bloch sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, Observable, PureState
from .errors import InvalidMomentsError, UnsupportedRelationError
from .relations import ObservableSet, Relation, SUM_FORM_RELATIONS

_SQRT3 = math.sqrt(3.0)
_SQRT2 = math.sqrt(2.0)

PAULI_AXES = ("x", "y", "z")

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Estimated moments may spill slightly outside the Bloch ball from shot
# noise.  Up to this much excess in v is silently fine, beyond it the
# moments get flagged, and past HARD_BALL_LIMIT they are rejected.
BALL_EXCESS_ATOL = 1e-6
HARD_BALL_LIMIT = 1.05


def pauli(axis: str) -> Observable:
    """The Pauli observable for ``axis`` in {'x', 'y', 'z'}."""
    if axis not in _PAULI:
        raise ValueError(f"unknown Pauli axis {axis!r}, expected one of {PAULI_AXES}")
    return Observable(_PAULI[axis])


def pauli_triple() -> ObservableSet:
    """The ordered set (sigma_x, sigma_y, sigma_z)."""
    return ObservableSet(tuple(pauli(axis) for axis in PAULI_AXES))


@dataclass(frozen=True)
class BlochAngles:
    """Polar angle theta in [0, pi] and azimuth phi in [0, 2 pi], radians."""

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        t, p = float(self.theta), float(self.phi)
        # Accept 1e-12 of slop at the ends so grid arithmetic cannot trip
        # the check, then clip onto the closed interval.
        if not -1e-12 <= t <= math.pi + 1e-12:
            raise ValueError(f"theta must be in [0, pi], got {t!r}")
        if not -1e-12 <= p <= 2.0 * math.pi + 1e-12:
            raise ValueError(f"phi must be in [0, 2 pi], got {p!r}")
        object.__setattr__(self, "theta", min(max(t, 0.0), math.pi))
        object.__setattr__(self, "phi", min(max(p, 0.0), 2.0 * math.pi))


def bloch_to_state(angles: BlochAngles) -> PureState:
    """The qubit ``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``."""
    half = 0.5 * angles.theta
    return PureState(
        np.array([math.cos(half), np.exp(1j * angles.phi) * math.sin(half)])
    )


@dataclass(frozen=True)
class QubitMoments:
    """Pauli expectations and every derived quantity the closed forms use.

    ``v`` is the squared Bloch length, ``d`` the sum of pairwise expectation
    products, ``e`` the magnitude of the summed expectations and ``h`` the
    sum of their magnitudes.  ``lp/lm``, ``mp/mm`` and ``np/nm`` are the
    standard deviations of the pair sums and differences for the (x, y),
    (y, z) and (z, x) axis pairs respectively.  ``outside_ball`` marks
    noisy estimates whose ``v`` exceeds 1 by more than ``BALL_EXCESS_ATOL``.
    """

    ex: float
    ey: float
    ez: float
    v: float
    d: float
    e: float
    h: float
    lp: float
    lm: float
    mp: float
    mm: float
    np: float
    nm: float
    outside_ball: bool = False

    def __post_init__(self) -> None:
        if abs(self.v - (self.ex**2 + self.ey**2 + self.ez**2)) > 1e-9:
            raise InvalidMomentsError("v does not match ex^2 + ey^2 + ez^2")
        if self.v > HARD_BALL_LIMIT + 1e-12:
            raise InvalidMomentsError(
                f"squared Bloch length {self.v!r} exceeds the hard limit {HARD_BALL_LIMIT}"
            )
        if self.h < self.e - 1e-12:
            raise InvalidMomentsError("h (sum of magnitudes) cannot be below e")
        for name in ("lp", "lm", "mp", "mm", "np", "nm"):
            value = getattr(self, name)
            if not -1e-12 <= value <= _SQRT2 + 1e-12:
                raise InvalidMomentsError(f"{name} = {value!r} is out of range [0, sqrt 2]")


def _derived(ex, ey, ez):
    """All derived moments; works elementwise on floats or numpy arrays."""
    v = ex * ex + ey * ey + ez * ez
    d = ex * ey + ey * ez + ez * ex
    e = np.abs(ex + ey + ez)
    h = np.abs(ex) + np.abs(ey) + np.abs(ez)
    # Pair variances 2 - (ei +/- ej)^2 can round below zero for edge states.
    lp = np.sqrt(np.clip(2.0 - (ex + ey) ** 2, 0.0, None))
    lm = np.sqrt(np.clip(2.0 - (ex - ey) ** 2, 0.0, None))
    mp = np.sqrt(np.clip(2.0 - (ey + ez) ** 2, 0.0, None))
    mm = np.sqrt(np.clip(2.0 - (ey - ez) ** 2, 0.0, None))
    np_ = np.sqrt(np.clip(2.0 - (ez + ex) ** 2, 0.0, None))
    nm = np.sqrt(np.clip(2.0 - (ez - ex) ** 2, 0.0, None))
    return v, d, e, h, lp, lm, mp, mm, np_, nm


def moments_from_expectations(ex: float, ey: float, ez: float) -> QubitMoments:
    """Build :class:`QubitMoments` from a measured or exact Pauli triple.

    Each input must lie in ``[-1 - 1e-9, 1 + 1e-9]``.  Estimates may land a
    little outside the Bloch ball; ``v`` beyond ``1 + BALL_EXCESS_ATOL`` is
    tolerated up to ``HARD_BALL_LIMIT`` but flagged, and anything past the
    hard limit raises :class:`InvalidMomentsError` since such a triple
    signals broken estimates rather than noise.
    """
    ex, ey, ez = float(ex), float(ey), float(ez)
    for name, value in (("ex", ex), ("ey", ey), ("ez", ez)):
        if not -1.0 - 1e-9 <= value <= 1.0 + 1e-9:
            raise InvalidMomentsError(f"{name} = {value!r} is outside [-1, 1]")
    v, d, e, h, lp, lm, mp, mm, np_, nm = _derived(ex, ey, ez)
    if v > HARD_BALL_LIMIT:
        raise InvalidMomentsError(
            f"squared Bloch length {float(v)!r} exceeds {HARD_BALL_LIMIT}; "
            "the expectation triple is not credible"
        )
    return QubitMoments(
        ex, ey, ez,
        float(v), float(d), float(e), float(h),
        float(lp), float(lm), float(mp), float(mm), float(np_), float(nm),
        outside_ball=bool(v > 1.0 + BALL_EXCESS_ATOL),
    )


def moments_from_angles(angles: BlochAngles) -> QubitMoments:
    """Exact moments of the pure state at the given Bloch angles."""
    sin_t = math.sin(angles.theta)
    return moments_from_expectations(
        sin_t * math.cos(angles.phi),
        sin_t * math.sin(angles.phi),
        math.cos(angles.theta),
    )


def _rhs_formula(relation: Relation, v, d, e, h, lp, lm, mp, mm, np_, nm):
    """Closed-form rhs; scalar or array arguments both work."""
    if relation is Relation.TRIPLE_SUM:
        return (3.0 - v - 2.0 * d) / 3.0 + (2.0 * _SQRT3 / 3.0) * e
    if relation is Relation.TRIPLE_COMMUTATOR:
        return (2.0 * _SQRT3 / 3.0) * h
    if relation is Relation.TRIPLE_PAIRWISE:
        return h
    if relation is Relation.SUM_PLUS:
        return 0.5 * (3.0 - v - d)
    if relation is Relation.SUM_MINUS:
        return 0.5 * (3.0 - v + d)
    if relation is Relation.CHEN_FEI:
        return 2.0 * (3.0 - v - d) - 0.25 * (lp + mp + np_) ** 2
    if relation is Relation.SONG:
        return (3.0 - v - 2.0 * d) / 3.0 + (lm + mm + nm) ** 2 / 9.0
    raise UnsupportedRelationError(
        f"no closed form for {relation.value}; only sum-form relations reduce "
        "to Pauli moments"
    )


def closed_form_lhs(moments: QubitMoments) -> float:
    """Sum of the three Pauli variances, ``3 - v``."""
    return 3.0 - moments.v


def closed_form_rhs(moments: QubitMoments, relation: Relation) -> float:
    """Closed-form bound for one sum-form relation at the given moments."""
    return float(
        _rhs_formula(
            relation,
            moments.v, moments.d, moments.e, moments.h,
            moments.lp, moments.lm, moments.mp, moments.mm,
            moments.np, moments.nm,
        )
    )


def closed_form_bounds(ex, ey, ez, relations=SUM_FORM_RELATIONS):
    """Vectorized closed forms for arrays of expectation triples.

    Args:
        ex, ey, ez: floats or same-shape numpy arrays of Pauli expectations.
        relations: sum-form relations to evaluate.

    Returns:
        ``(lhs, bounds)`` where ``lhs`` is ``3 - v`` and ``bounds`` maps each
        relation to its rhs, elementwise over the inputs.  No Bloch-ball
        validation happens here; radicands are clamped at zero so noisy
        bootstrap replicates cannot produce NaNs.
    """
    v, d, e, h, lp, lm, mp, mm, np_, nm = _derived(
        np.asarray(ex, dtype=float),
        np.asarray(ey, dtype=float),
        np.asarray(ez, dtype=float),
    )
    lhs = 3.0 - v
    bounds = {
        rel: _rhs_formula(rel, v, d, e, h, lp, lm, mp, mm, np_, nm)
        for rel in relations
    }
    return lhs, bounds


@dataclass(frozen=True)
class StokesVector:
    """Light-polarization Stokes parameters ``(s0, s1, s2, s3)``.

    ``s0`` is the total intensity and must be positive; the polarized part
    cannot exceed it, so ``s1^2 + s2^2 + s3^2 <= s0^2`` within a relative
    1e-9.  Only the ratios ``s_i / s0`` matter downstream, so any overall
    intensity scale is accepted.
    """

    s0: float
    s1: float
    s2: float
    s3: float

    def __post_init__(self) -> None:
        if not self.s0 > 0.0:
            raise ValueError(f"s0 must be positive, got {self.s0!r}")
        polarized = self.s1**2 + self.s2**2 + self.s3**2
        if polarized > self.s0**2 * (1.0 + 1e-9):
            raise ValueError(
                f"polarized intensity {polarized!r} exceeds s0^2 = {self.s0**2!r}"
            )


def stokes_to_density(stokes: StokesVector) -> DensityMatrix:
    """Reconstruct the qubit density matrix ``(I + sum_i (s_i/s0) sigma_i)/2``.

    The Stokes invariant keeps the result positive semidefinite up to
    round-off;  :class:`DensityMatrix` re-checks that defensively.
    """
    rx = stokes.s1 / stokes.s0
    ry = stokes.s2 / stokes.s0
    rz = stokes.s3 / stokes.s0
    rho = 0.5 * np.array(
        [[1.0 + rz, rx - 1j * ry], [rx + 1j * ry, 1.0 - rz]], dtype=complex
    )
    return DensityMatrix(rho)


def moments_from_stokes(stokes: StokesVector) -> QubitMoments:
    """Derived moments straight from Stokes parameters.

    The Pauli expectations are the normalized Stokes components
    ``s_i / s0``; each derived moment is computed from its own Stokes
    expression rather than by delegating to
    :func:`moments_from_expectations`, which keeps the two construction
    routes independent enough to cross-check.
    """
    s0, s1, s2, s3 = stokes.s0, stokes.s1, stokes.s2, stokes.s3
    s0_sq = s0 * s0
    ex, ey, ez = s1 / s0, s2 / s0, s3 / s0
    v = (s1 * s1 + s2 * s2 + s3 * s3) / s0_sq
    d = (s1 * s2 + s2 * s3 + s3 * s1) / s0_sq
    e = abs((s1 + s2 + s3) / s0)
    h = abs(s1 / s0) + abs(s2 / s0) + abs(s3 / s0)
    lp = math.sqrt(max(2.0 - (s1 / s0 + s2 / s0) ** 2, 0.0))
    lm = math.sqrt(max(2.0 - (s1 / s0 - s2 / s0) ** 2, 0.0))
    mp = math.sqrt(max(2.0 - (s2 / s0 + s3 / s0) ** 2, 0.0))
    mm = math.sqrt(max(2.0 - (s2 / s0 - s3 / s0) ** 2, 0.0))
    np_ = math.sqrt(max(2.0 - (s3 / s0 + s1 / s0) ** 2, 0.0))
    nm = math.sqrt(max(2.0 - (s3 / s0 - s1 / s0) ** 2, 0.0))
    return QubitMoments(ex, ey, ez, v, d, e, h, lp, lm, mp, mm, np_, nm)


def density_to_stokes(rho: DensityMatrix) -> StokesVector:
    """Unit-intensity Stokes parameters of a qubit density matrix."""
    if rho.dim != 2:
        raise ValueError(f"Stokes parameters are defined for qubits, got dim {rho.dim}")
    m = rho.matrix
    return StokesVector(
        1.0,
        float(np.trace(m @ _PAULI["x"]).real),
        float(np.trace(m @ _PAULI["y"]).real),
        float(np.trace(m @ _PAULI["z"]).real),
    )
