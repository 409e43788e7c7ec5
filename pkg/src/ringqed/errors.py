"""Exception types raised across the package.

Everything derives from RingQedError so callers (and the CLI) can catch
data/model failures in one place and map them to a nonzero exit code.
"""


class RingQedError(Exception):
    """Base class for all package errors."""


class DomainError(RingQedError):
    """A scalar argument is outside its physical domain."""


class ParseError(RingQedError):
    """A structured text file failed to parse.

    Carries the offending line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class NonMonotonicAxis(RingQedError):
    """Sample axis is not strictly ascending (duplicates included)."""


class NonOrthogonalRotation(RingQedError):
    """Matrix handed in as a rotation is not orthogonal with det +1."""


class EmptyGrid(RingQedError):
    """A sampled grid (wavelengths, bins, mode field) has no points."""


class DegenerateField(RingQedError):
    """Mode field has no energy density, so no volume is defined."""


class StrainOutOfRange(RingQedError):
    """Computed strain exceeds the linear-response validity bound."""


class VoltageLimitExceeded(RingQedError):
    """Requested drive voltage is outside the device limits."""


class PeakOverlap(RingQedError):
    """Pulse peaks overlap too strongly to form a resolvable comb."""


class SingularJacobian(RingQedError):
    """Normal equations are singular; the model is locally unidentifiable."""


class MaxIterations(RingQedError):
    """Fit did not converge within the iteration budget."""


class InsufficientData(RingQedError):
    """Too few (or non-finite) samples for the requested fit."""


class NoResonanceFound(RingQedError):
    """No dip rises above the detection threshold in the spectrum."""


class InsufficientDynamicRange(RingQedError):
    """Decay histogram spans less than one decade of counts."""


class DegenerateAbscissa(RingQedError):
    """All abscissa values coincide; a slope cannot be estimated."""


class PeakDetectionFailure(RingQedError):
    """Correlation histogram does not expose the expected peak comb."""


class InfeasiblePlan(RingQedError):
    """Alignment plan is infeasible and cannot be evaluated further."""
