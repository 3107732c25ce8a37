"""Exception hierarchy shared by every flatlp module."""


class FlatLPError(Exception):
    """Base class for all errors raised by flatlp."""


class DimensionMismatch(FlatLPError, ValueError):
    pass


class ZeroRow(FlatLPError):
    """A constraint row has (numerically) zero norm over the live columns."""

    def __init__(self, row_id, norm):
        super().__init__(f"row {row_id} has live-column norm {norm:.3g}")
        self.row_id = row_id
        self.norm = norm


class DegenerateObjective(FlatLPError):
    """The objective direction is too short to define a unit direction."""


class UnboundedDirection(FlatLPError):
    """No candidate constraint opposes motion along the objective direction."""


class NoCandidates(FlatLPError):
    """Every live row has been rejected."""


class InfeasibleDetected(FlatLPError):
    """A certificate of infeasibility was found (e.g. a vacuous row 0 <= r < 0)."""


class IncompleteTrace(FlatLPError):
    """Back-substitution left at least one variable undetermined."""


class NotInterior(FlatLPError):
    """A point that must be strictly feasible is not."""


class UnboundedChord(FlatLPError):
    """A hit-and-run chord is unbounded, so the region is not a polytope."""


class EmptySample(FlatLPError, ValueError):
    pass


class NotOnPlane(FlatLPError):
    pass


class Singular(FlatLPError):
    pass


class OracleTooLarge(FlatLPError):
    """The vertex enumeration would exceed the configured subset cap."""


class ParseError(FlatLPError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
