"""Exception types shared across the package.

Error class names match the operation contracts they implement; all of them
derive from FiberscopeError so callers can catch library errors in one go.
"""


class FiberscopeError(Exception):
    pass


# ---- flag complexes ----

class IndexOutOfRange(FiberscopeError):
    pass


class DuplicateEdge(FiberscopeError):
    pass


class SelfLoop(FiberscopeError):
    pass


class WidthMismatch(FiberscopeError):
    pass


class NotASimplex(FiberscopeError):
    pass


# ---- homology ----

class DegreeOutOfRange(FiberscopeError):
    pass


# ---- buildings ----

class NotPrime(FiberscopeError):
    pass


class TooLarge(FiberscopeError):
    pass


class UnknownChamber(FiberscopeError):
    pass


class NonUniqueMinimizer(FiberscopeError):
    """The gate property failed: more than one chamber attains the minimum.

    Theory guarantees a unique minimizer, so seeing this means the
    implementation (not the input) is broken.
    """


class NotAFrame(FiberscopeError):
    pass


# ---- magic cubes ----

class DuplicatePanel(FiberscopeError):
    pass


class NotMagic(FiberscopeError):
    def __init__(self, axis, index, observed, expected):
        self.axis = axis
        self.index = index
        self.observed = observed
        self.expected = expected
        super().__init__(
            f"axis {axis}, index {index}: slice sum {observed} != {expected}"
        )


class ZeroWeightCube(FiberscopeError):
    pass


class NotFound(FiberscopeError):
    """A constructive search fell short; carries the longest achieved prefix."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved if achieved is not None else []
        super().__init__(message)


# ---- coset game ----

class ImproperColoring(FiberscopeError):
    pass


class UnsupportedDegree(FiberscopeError):
    pass


class BudgetExceeded(FiberscopeError):
    pass


# ---- Davis complex / Morse checks ----

class CapExceeded(FiberscopeError):
    pass


class BoundaryElement(FiberscopeError):
    pass


class InconsistentHeight(FiberscopeError):
    """Height assignment contradicts itself on some edge of the ball.

    This is exactly the failure mode of an invalid move system (a vertex
    lying in the move of an adjacent vertex).
    """
