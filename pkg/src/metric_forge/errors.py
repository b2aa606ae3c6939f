"""Exception hierarchy shared by all metric_forge modules."""


class MetricForgeError(ValueError):
    """Base class for every error raised by this package."""


class ParameterOutOfRange(MetricForgeError):
    pass


class KindMismatch(MetricForgeError):
    pass


class ChannelError(MetricForgeError):
    """Malformed channel matrix (bad shape, entries outside [0, 1], bad sums)."""


class SpaceTooLarge(MetricForgeError):
    pass


class ZeroProbabilityFactor(MetricForgeError):
    pass


class DeltaOutOfRange(MetricForgeError):
    pass


class OracleScaleExceeded(MetricForgeError):
    pass


class SpaceMismatch(MetricForgeError):
    pass


class SemimetricError(MetricForgeError):
    pass


class CycleExists(MetricForgeError):
    """The preference digraph has a directed cycle; carries the witness."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__("preference graph has a cycle: " + " ; ".join(witness.violated_inequalities))
