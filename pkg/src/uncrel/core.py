"""Exact state and observable arithmetic for small finite-dimensional systems.

Everything here is dense double-precision numpy.  Observables and states are
immutable after construction and validated eagerly, so downstream code can
assume Hermiticity, normalization and matching dimensions without re-checking.
All functions are pure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConsistencyError,
    DimensionError,
    UnsupportedDimensionError,
)

# Construction-time tolerances.
HERMITICITY_ATOL = 1e-12
NORMALIZATION_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-10

# Run-time tolerances for quantities that are real or non-negative up to
# round-off.  Residues beyond these indicate corrupted inputs, not noise.
IMAG_RESIDUE_ATOL = 1e-10
VARIANCE_CLAMP_ATOL = 1e-10

# Deviation vectors shorter than this are treated as exactly zero, i.e. the
# state is an eigenstate and no normalized deviation direction exists.
DEVIATION_NORM_FLOOR = 1e-12


def _as_square_complex(values, what: str) -> np.ndarray:
    m = np.asarray(values, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise UnsupportedDimensionError(
            f"{what} must act on a space of dimension >= 2, got {m.shape[0]}"
        )
    return m


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian matrix on a d-dimensional system, d >= 2.

    The stored array is a read-only copy of the input; Hermiticity is
    enforced entrywise at construction within ``HERMITICITY_ATOL``.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _as_square_complex(self.matrix, "observable")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITICITY_ATOL):
            raise ValueError("observable matrix is not Hermitian within 1e-12")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "Observable") -> "Observable":
        if not isinstance(other, Observable):
            return NotImplemented
        _check_same_dim(self.dim, other.dim)
        return Observable(self.matrix + other.matrix)

    def __sub__(self, other: "Observable") -> "Observable":
        if not isinstance(other, Observable):
            return NotImplemented
        _check_same_dim(self.dim, other.dim)
        return Observable(self.matrix - other.matrix)

    def __mul__(self, scale: float) -> "Observable":
        if not isinstance(scale, (int, float)):
            return NotImplemented
        return Observable(self.matrix * float(scale))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Observable(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized state vector.

    Invariant: the squared amplitudes sum to 1 within ``NORMALIZATION_ATOL``.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.size < 2:
            raise UnsupportedDimensionError(
                f"state vector must have dimension >= 2, got {v.size}"
            )
        norm_sq = float(np.vdot(v, v).real)
        if abs(norm_sq - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(
                f"state vector is not normalized: sum of |amplitude|^2 = {norm_sq!r}"
            )
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        """The rank-one projector onto this state."""
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A mixed state: Hermitian, unit trace, positive semidefinite.

    Positivity is checked through the eigenvalue spectrum; the smallest
    eigenvalue may sit below zero by at most ``PSD_ATOL`` to absorb
    round-off from reconstructed matrices.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _as_square_complex(self.matrix, "density matrix")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITICITY_ATOL):
            raise ValueError("density matrix is not Hermitian within 1e-12")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        smallest = float(np.linalg.eigvalsh(m)[0])
        if smallest < -PSD_ATOL:
            raise ValueError(
                f"density matrix has negative eigenvalue {smallest!r}"
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


# States are passed around as a tagged union; dispatch is by isinstance.
QuantumState = PureState | DensityMatrix


def _check_same_dim(*dims: int) -> None:
    if len(set(dims)) > 1:
        raise DimensionError(f"dimension mismatch: {dims}")


def _real_part(value: complex, what: str) -> float:
    if abs(value.imag) >= IMAG_RESIDUE_ATOL:
        raise ConsistencyError(
            f"{what} has imaginary residue {value.imag!r} beyond tolerance"
        )
    return float(value.real)


def _clamp_variance(raw: float) -> float:
    if raw >= 0.0:
        return raw
    if raw > -VARIANCE_CLAMP_ATOL:
        return 0.0
    raise ConsistencyError(f"variance {raw!r} is negative beyond round-off")


# Raw-array workhorses.  These skip wrapper validation and are shared by the
# relation engine, which extracts the underlying arrays once per call.

def _expect_vec(m: np.ndarray, psi: np.ndarray) -> float:
    return _real_part(complex(np.vdot(psi, m @ psi)), "expectation value")


def _expect_rho(m: np.ndarray, rho: np.ndarray) -> float:
    return _real_part(complex(np.trace(rho @ m)), "expectation value")


def _var_vec(m: np.ndarray, psi: np.ndarray) -> float:
    w = m @ psi
    mean = _real_part(complex(np.vdot(psi, w)), "expectation value")
    # <A^2> = |A psi|^2 for Hermitian A, so one matrix-vector product suffices.
    second = float(np.vdot(w, w).real)
    return _clamp_variance(second - mean * mean)


def _var_rho(m: np.ndarray, rho: np.ndarray) -> float:
    mean = _expect_rho(m, rho)
    second = _expect_rho(m @ m, rho)
    return _clamp_variance(second - mean * mean)


def _comm_vec(a: np.ndarray, b: np.ndarray, psi: np.ndarray) -> complex:
    value = complex(np.vdot(psi, a @ (b @ psi)) - np.vdot(psi, b @ (a @ psi)))
    if abs(value.real) >= IMAG_RESIDUE_ATOL:
        raise ConsistencyError(
            f"commutator expectation has real residue {value.real!r}"
        )
    return value


def _comm_rho(a: np.ndarray, b: np.ndarray, rho: np.ndarray) -> complex:
    value = complex(np.trace(rho @ (a @ b)) - np.trace(rho @ (b @ a)))
    if abs(value.real) >= IMAG_RESIDUE_ATOL:
        raise ConsistencyError(
            f"commutator expectation has real residue {value.real!r}"
        )
    return value


def expectation(obs: Observable, state: QuantumState) -> float:
    """Mean value of ``obs`` in ``state``.

    Returns ``<psi|A|psi>`` for a pure state and ``Tr(rho A)`` for a mixed
    one.  The result of either contraction is real for a Hermitian matrix;
    an imaginary residue at or above ``IMAG_RESIDUE_ATOL`` raises
    :class:`ConsistencyError`.
    """
    _check_same_dim(obs.dim, state.dim)
    if isinstance(state, PureState):
        return _expect_vec(obs.matrix, state.amplitudes)
    if isinstance(state, DensityMatrix):
        return _expect_rho(obs.matrix, state.matrix)
    raise TypeError(f"not a quantum state: {state!r}")


def variance(obs: Observable, state: QuantumState) -> float:
    """Variance ``<A^2> - <A>^2`` of ``obs`` in ``state``.

    Exact zeros (eigenstates) may round to small negative values; results in
    ``(-VARIANCE_CLAMP_ATOL, 0)`` are clamped to 0.0, anything lower raises
    :class:`ConsistencyError`.
    """
    _check_same_dim(obs.dim, state.dim)
    if isinstance(state, PureState):
        return _var_vec(obs.matrix, state.amplitudes)
    if isinstance(state, DensityMatrix):
        return _var_rho(obs.matrix, state.matrix)
    raise TypeError(f"not a quantum state: {state!r}")


def commutator_expectation(a: Observable, b: Observable, state: QuantumState) -> complex:
    """Expectation of the commutator ``[A, B] = AB - BA``.

    For Hermitian ``A`` and ``B`` this is purely imaginary; the real part is
    checked against ``IMAG_RESIDUE_ATOL`` and the full complex value is
    returned so callers can take magnitudes or signed combinations.
    """
    _check_same_dim(a.dim, b.dim, state.dim)
    if isinstance(state, PureState):
        return _comm_vec(a.matrix, b.matrix, state.amplitudes)
    if isinstance(state, DensityMatrix):
        return _comm_rho(a.matrix, b.matrix, state.matrix)
    raise TypeError(f"not a quantum state: {state!r}")


def deviation_state(obs: Observable, psi: PureState) -> tuple[float, PureState | None]:
    """Normalize ``(A - <A>)|psi>`` and return ``(norm, direction)``.

    The norm equals the standard deviation of ``obs`` in ``psi``.  When it
    falls below ``DEVIATION_NORM_FLOOR`` the state is an eigenstate and the
    direction is ``None``.  The returned direction is orthogonal to ``psi``
    by construction.
    """
    if not isinstance(psi, PureState):
        raise TypeError(f"deviation_state needs a PureState, got {psi!r}")
    _check_same_dim(obs.dim, psi.dim)
    v = psi.amplitudes
    w = obs.matrix @ v
    mean = _real_part(complex(np.vdot(v, w)), "expectation value")
    residual = w - mean * v
    norm = float(np.linalg.norm(residual))
    if norm < DEVIATION_NORM_FLOOR:
        return norm, None
    return norm, PureState(residual / norm)


def orthogonal_qubit(psi: PureState) -> PureState:
    """The unique (up to phase) state orthogonal to a qubit state.

    Uses the fixed phase convention ``(a, b) -> (-conj(b), conj(a))`` so the
    result is deterministic.  Only defined for dimension 2.
    """
    if not isinstance(psi, PureState):
        raise TypeError(f"orthogonal_qubit needs a PureState, got {psi!r}")
    if psi.dim != 2:
        raise UnsupportedDimensionError(
            f"orthogonal complement choice is only fixed for qubits, got dim {psi.dim}"
        )
    a, b = psi.amplitudes
    return PureState(np.array([-np.conj(b), np.conj(a)]))


def random_pure_state(dim: int, seed) -> PureState:
    """Haar-random pure state: a normalized complex Gaussian vector.

    Args:
        dim: Hilbert-space dimension, at least 2.
        seed: anything accepted by ``numpy.random.default_rng``; the same
            seed always yields the same state.
    """
    if dim < 2:
        raise UnsupportedDimensionError(f"dimension must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    norm = float(np.linalg.norm(v))
    while norm < 1e-6:  # vanishing draw, probability ~0 but cheap to guard
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        norm = float(np.linalg.norm(v))
    return PureState(v / norm)


def random_observable(dim: int, seed) -> Observable:
    """Random Hermitian matrix ``(G + G^dagger) / 2`` with Gaussian ``G``."""
    if dim < 2:
        raise UnsupportedDimensionError(f"dimension must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Observable((g + g.conj().T) / 2.0)
