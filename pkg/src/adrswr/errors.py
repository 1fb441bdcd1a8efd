"""Exception hierarchy. Each error carries the name of the module that raised it."""


class SWRError(Exception):
    """Base class for every error raised by the package."""

    module = "adrswr"

    def __str__(self):
        return f"{self.module}: {super().__str__()}"


class DegenerateStencilError(SWRError, ValueError):
    module = "stencil"


class UnknownCaseError(SWRError, KeyError):
    module = "stencil"

    def __str__(self):
        # KeyError.__str__ would repr() the message
        return f"{self.module}: {self.args[0]}"


class InvalidProblemError(SWRError, ValueError):
    module = "stencil"


class BranchError(SWRError, ArithmeticError):
    module = "symbol"


class PoleError(SWRError, ZeroDivisionError):
    module = "symbol"


class InvalidParameterError(SWRError, ValueError):
    module = "symbol"


class NoRootError(SWRError, RuntimeError):
    module = "optimizer"


class SingularSystemError(SWRError, ArithmeticError):
    module = "solver"


class InsufficientDataError(SWRError, ValueError):
    module = "solver"
