"""Exception types shared across the package."""

from __future__ import annotations


class SpliceRankError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(SpliceRankError):
    """A matrix or block has a shape incompatible with its slot."""


class PivotZero(SpliceRankError):
    """Cancellation was requested at a zero entry."""


class NotAComplex(SpliceRankError):
    """A boundary matrix does not square to zero."""


class NoFlipData(SpliceRankError):
    """Neither a basis symmetry nor an explicit flip matrix is available."""


class NotChainMap(SpliceRankError):
    """A purported chain map fails to commute with the differentials."""


class NotQuasiIso(SpliceRankError):
    """A chain map is not a quasi-isomorphism where one is required."""


class UnknownName(SpliceRankError):
    """A corpus name that is not in the catalog."""


class WindowNotStable(SpliceRankError):
    """Surgery homology fails to vanish outside the computed support window."""


class TauRelationFailure(SpliceRankError):
    """The duality maps do not satisfy the barred-map relations."""


class NormalizationFailure(SpliceRankError):
    """Simultaneous normal form for the triangle maps could not be built."""


class StatsInconsistent(SpliceRankError):
    """Closed-form package statistics disagree with direct computation."""


class WitnessNotInKernel(SpliceRankError):
    """An assembled kernel witness is not annihilated by the splice matrix."""


class SamplingExhausted(SpliceRankError):
    """Rejection sampling hit its retry budget."""


class InputFormatError(SpliceRankError):
    """A JSON input file violates the documented schema."""

    def __init__(self, path: str, message: str):
        self.pointer = path
        super().__init__(f"{path}: {message}")
