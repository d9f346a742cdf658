"""Exception hierarchy shared by every module of the package."""


class DesignError(Exception):
    """Base class for all errors raised by pbdim."""


class NotPrime(DesignError, ValueError):
    def __init__(self, p):
        super().__init__(f"{p} is not prime")
        self.p = p


class NotPrimePower(DesignError, ValueError):
    def __init__(self, q):
        super().__init__(f"{q} is not a prime power")
        self.q = q


class TooLarge(DesignError, ValueError):
    pass


class Unsupported(DesignError, ValueError):
    """The built-in generators cannot produce the requested object."""


class Inadmissible(DesignError, ValueError):
    pass


class EmptyK(DesignError, ValueError):
    def __init__(self):
        super().__init__("block size set K must be nonempty with every size >= 2")


class BelowThreshold(DesignError, ValueError):
    def __init__(self, y, A, c):
        threshold = A * (A + c + 1) + c
        super().__init__(f"y={y} is below the guaranteed threshold {threshold} for A={A}, c={c}")
        self.y, self.A, self.c, self.threshold = y, A, c, threshold


class UnknownPoint(DesignError, ValueError):
    def __init__(self, point, v):
        super().__init__(f"point {point} is not in 0..{v - 1}")
        self.point = point


class MissingIngredient(DesignError, LookupError):
    def __init__(self, request):
        super().__init__(f"missing ingredient: {request}")
        self.request = request


class BadGroup(DesignError, IndexError):
    pass


class BadKeep(DesignError, ValueError):
    pass


class VerificationFailed(DesignError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoParametersWithinLimits(DesignError):
    """Planner exhausted its search limits.

    ``blocked`` lists ``(candidate, reason)`` pairs in search order; the
    first entry names the first ingredient that could not be resolved.
    """

    def __init__(self, message, blocked=()):
        super().__init__(message)
        self.blocked = list(blocked)


class StageFailed(DesignError):
    def __init__(self, stage, message, trace=None):
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage
        self.trace = trace


class FormatError(DesignError, ValueError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
