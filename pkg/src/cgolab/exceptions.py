"""Exception hierarchy."""


class CGOLabError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(CGOLabError, ValueError):
    pass


class PreconditionError(CGOLabError, ValueError):
    pass


class SingularSymbolError(CGOLabError, ArithmeticError):
    def __init__(self, message, frequency=None):
        super().__init__(message)
        self.frequency = frequency


class DivergenceError(CGOLabError, ArithmeticError):
    """A time stepper produced non-finite values or a fixed-point iteration diverged."""

    def __init__(self, message, step=None, contraction=None):
        super().__init__(message)
        self.step = step
        self.contraction = contraction


class InvalidStateError(CGOLabError, RuntimeError):
    pass


class MissingSampleError(CGOLabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing sample"


class CorruptFileError(CGOLabError, IOError):
    pass
