"""Exception types raised by respkern."""


class RespKernError(Exception):
    """Base class for all errors raised by the package."""


class SectorTooLargeError(RespKernError, ValueError):
    pass


class DimensionMismatchError(RespKernError, ValueError):
    pass


class NonHermitianError(RespKernError, ValueError):
    pass


class IntegralParseError(RespKernError, ValueError):
    """Malformed integral or operator file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonHermitianIntegralsError(NonHermitianError):
    pass


class Psi0OutsideDegenerateSubspaceError(RespKernError, ValueError):
    pass


class EmptyOperatorSetError(RespKernError, ValueError):
    pass


class TooFewSamplesError(RespKernError, ValueError):
    pass


class NonPositiveSError(RespKernError, ValueError):
    pass


class UnsupportedProfileError(RespKernError, ValueError):
    pass


class DegenerateGroundStateError(RespKernError, ValueError):
    pass


class NotTwoElectronError(RespKernError, ValueError):
    pass


class NonPairedStructureError(RespKernError, ValueError):
    pass


class OddOrbitalLayoutError(RespKernError, ValueError):
    pass


class NonPeriodicLayoutError(RespKernError, ValueError):
    pass


class UnsupportedLabelError(RespKernError, ValueError):
    pass


class CoincidentNodesError(RespKernError, ValueError):
    pass


class StepTooLargeError(RespKernError, RuntimeError):
    pass


class ConfigError(RespKernError, ValueError):
    pass
