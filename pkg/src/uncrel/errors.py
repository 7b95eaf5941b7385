"""Exception types shared across the package.

Caller-side contract violations derive from :class:`ContractError` (a
``ValueError``), so sloppy inputs fail loudly at the boundary.  Internal
numerical invariants that fail beyond round-off raise
:class:`ConsistencyError` instead; those indicate a bug or a corrupted
input matrix, never a recoverable condition.
"""


class ContractError(ValueError):
    """A caller-side precondition was violated."""


class DimensionError(ContractError):
    """Operands act on spaces of different dimensions."""


class UnsupportedDimensionError(ContractError):
    """The operation is not provided for this dimension."""


class UnsupportedStateError(ContractError):
    """The relation is defined for pure states only."""


class UnsupportedCountError(ContractError):
    """Too few observables for this relation."""


class UnsupportedRelationError(ContractError):
    """No closed form is available for this relation."""


class InvalidMomentsError(ContractError):
    """Supplied Pauli expectations lie too far outside the Bloch ball."""


class OrthogonalityError(ContractError):
    """A companion state is not orthogonal to the reference state."""


class ConsistencyError(ArithmeticError):
    """An internal numerical invariant failed beyond round-off tolerance."""
