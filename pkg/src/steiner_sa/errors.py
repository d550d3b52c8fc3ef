"""Exception types shared across the package."""


class SteinerError(Exception):
    """Base class for all errors raised by this package."""


# --- instance construction ---

class NonPositiveCost(SteinerError):
    """An arc or edge carries a cost <= 0."""


class RootIsTerminal(SteinerError):
    """The root node appears in the terminal list."""


class UnreachableTerminal(SteinerError):
    """Some terminal cannot be reached from the root."""


# --- STP file handling ---

class StpSyntaxError(SteinerError):
    """Malformed line in an STP document."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class CountMismatch(SteinerError):
    """Declared element count disagrees with the number of lines found."""


class MissingSection(SteinerError):
    """STP document lacks a mandatory section."""


class NoCoordinates(SteinerError):
    """A coordinate-based root policy was requested without coordinates."""


# --- laminar families ---

class NotLaminar(SteinerError):
    """Two sets of the collection cross (neither nested nor disjoint)."""


class NotAdmissible(SteinerError):
    """Family is missing the full commodity set or a singleton."""


class DuplicateSet(SteinerError):
    """The same commodity set appears twice in the input collection."""


class NoNeighbor(SteinerError):
    """The SPR neighborhood of this family is empty (fewer than 3 commodities)."""


class NotArborescence(SteinerError):
    """Arc set is not an r-arborescence covering all terminals."""


class DisconnectedTerminals(SteinerError):
    """Some terminal pair is mutually unreachable in the metric closure."""


class MissingCoordinates(SteinerError):
    """A commodity has no planar coordinates."""


# --- solving ---

class Infeasible(SteinerError):
    """The structure cannot be realized (infinite cost at the root)."""


class Unreachable(SteinerError):
    """A required node is unreachable inside the given arc subset."""


# --- benchmarking ---

class NoKnownOptima(SteinerError):
    """No result row carries a known optimum; profiles cannot be computed."""
