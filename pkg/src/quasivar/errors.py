"""Exception types shared across the package."""


class QuasivarError(Exception):
    pass


class SignatureError(QuasivarError):
    """Symbol/arity mismatch, or algebras over different signatures."""


class NotACongruenceError(QuasivarError):
    pass


class ResourceError(QuasivarError):
    """A configured cap was exceeded.

    ``cap`` names the limit and ``attained`` the size that tripped it.
    """

    def __init__(self, cap, limit, attained, what=""):
        self.cap = cap
        self.limit = limit
        self.attained = attained
        msg = f"{cap} exceeded: limit {limit}, attained {attained}"
        if what:
            msg += f" ({what})"
        super().__init__(msg)


class ParseError(QuasivarError):
    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
