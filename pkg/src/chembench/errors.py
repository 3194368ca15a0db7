"""Exception taxonomy shared by all chembench modules."""


class BenchError(Exception):
    """Base class for all chembench errors."""


class ParseError(BenchError):
    """A data file is syntactically malformed. Carries a line locus when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(BenchError):
    """A data file parsed but violates a declared invariant."""


class NotFound(BenchError, KeyError):
    """Lookup of an undeclared name."""


class CapacityExceeded(BenchError):
    """A vessel cannot hold the requested liquid volume."""


class NoSolventPresent(BenchError):
    """A dissolved-phase addition was requested on a solvent-free vessel."""


class DimensionMismatch(BenchError):
    """A concentration vector does not match the network species count."""


class StepLimitExceeded(BenchError):
    """The adaptive integrator exhausted its step budget."""


class EmptyVessel(BenchError):
    """A heat event was applied to a vessel with no contents."""


class UnknownMethod(BenchError):
    """An unregistered characterization method was requested."""


class UnknownScenario(BenchError):
    """An unknown bench scenario name."""


class ConfigError(BenchError):
    """A scenario configuration is inconsistent or incomplete."""


class EpisodeDone(BenchError):
    """step() was called on a finished episode; call reset() first."""


class IndexOutOfRange(BenchError, IndexError):
    """A discrete action index is outside the declared action space."""
