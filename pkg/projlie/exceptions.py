class ProjLieError(Exception):
    """Base class for every error raised by projlie."""


# # # Jets # # #


class JetError(ProjLieError):
    pass


class DivisionByZeroJet(JetError, ZeroDivisionError):
    pass


class DegreeMismatch(JetError, ValueError):
    """Operands disagree in center, truncation degree or scalar kind."""


class MissingCoefficient(JetError, KeyError):
    pass


class DomainError(ProjLieError, ValueError):
    """A function was evaluated outside its domain; the sample point must be rejected."""


class SingularPath(DomainError):
    pass


class QuadratureNonconvergence(ProjLieError, ArithmeticError):
    pass


# # # Geometry and solutions # # #


class DegenerateMetric(ProjLieError, ArithmeticError):
    pass


class DegenerateSolution(ProjLieError, ArithmeticError):
    """The solution exists but det(a) = 0, so no metric corresponds to it here."""


class UndefinedCombination(ProjLieError, ArithmeticError):
    pass


class IllConditionedFit(ProjLieError):
    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class NotNullForm(ProjLieError, ValueError):
    pass


# # # Catalog # # #


class ParamConstraintViolation(ProjLieError, ValueError):
    def __init__(self, constraint, parameter=None, value=None):
        message = f"Parameter constraint violated: {constraint}"
        if parameter is not None:
            message += f" (got {parameter}={value!r})"
        super().__init__(message)
        self.constraint = constraint
        self.parameter = parameter
        self.value = value


# # # Dynamics # # #


class DomainExit(ProjLieError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StepUnderflow(ProjLieError, ArithmeticError):
    pass


class EmptyTrajectory(ProjLieError, ValueError):
    pass


# # # Configuration # # #


class ConfigError(ProjLieError):
    pass
