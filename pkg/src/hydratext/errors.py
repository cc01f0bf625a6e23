"""Exception types shared across the package."""


class HydratextError(Exception):
    """Base class for errors raised by this package."""


class InfeasibleSolution(HydratextError):
    """A solution violates candidate membership or the one-per-position rule."""


class MissingProbabilities(HydratextError):
    """A score-mode objective evaluation received no probability vector."""


class EmptyPopulation(HydratextError):
    """A best solution was requested from a population with no entries."""


class OriginalMisclassified(HydratextError):
    """The oracle does not assign the expected label to the unperturbed input."""


class SearchSpaceTooLarge(HydratextError):
    """Exhaustive enumeration refused: too many feasible solutions."""


class GroundSetTooLarge(HydratextError):
    """Set-function probe refused: ground set beyond the enumeration cap."""


class OracleTransport(HydratextError):
    """Remote oracle failure: timeout, malformed reply, or id mismatch."""


class ProtocolViolation(HydratextError):
    """A remote oracle reply violates the wire contract, e.g. wrong vector length."""


class DimensionMismatch(HydratextError):
    """Cosine similarity was asked of vectors with different lengths."""


class DatasetFormat(HydratextError):
    """A dataset or instance file could not be parsed."""


class InvalidLabel(HydratextError):
    """A label lies outside [0, num_classes)."""
