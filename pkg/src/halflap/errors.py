"""Exception hierarchy shared by all halflap modules."""


class HalflapError(Exception):
    """Base class for every error raised by this package."""


class UnsupportedDomainError(HalflapError, ValueError):
    """The requested operation needs analytic eigenpairs the domain lacks."""


class DomainMismatchError(HalflapError, ValueError):
    pass


class UndefinedCfError(HalflapError, ValueError):
    """``max |f(t)|/|t|`` is zero, so the non-existence bound is undefined."""


class NoWitnessError(HalflapError):
    """No point with positive potential was found on the search grid."""


class NumericalFailure(HalflapError, ArithmeticError):
    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DegenerateGeometryError(HalflapError):
    """The mountain-pass path lost its interior maximum."""


class SolverStageError(HalflapError):
    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


class ConfigError(HalflapError, ValueError):
    pass
