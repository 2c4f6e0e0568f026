"""Exception hierarchy shared by all dkgreen modules."""


class DKGreenError(Exception):
    """Base class; ``parameter`` names the offending input when known."""

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message)
        self.parameter = parameter

    def to_dict(self) -> dict:
        out = {"error": type(self).__name__, "message": str(self)}
        if self.parameter is not None:
            out["parameter"] = self.parameter
        return out


class ParameterError(DKGreenError, ValueError):
    pass


class DomainError(DKGreenError, ValueError):
    pass


class OrderError(DKGreenError, ValueError):
    pass


class PoleError(DKGreenError, ArithmeticError):
    """Evaluation requested at (or numerically on top of) a Gamma-function pole."""


class NonConvergence(DKGreenError, ArithmeticError):
    pass


class DegenerateMap(DKGreenError, ArithmeticError):
    pass


class ThresholdError(ParameterError):
    """|energy ratio| >= 1: outside the bound regime."""


class FallToCenter(ParameterError):
    """Coupling at or above mu_C: the reduced angular index turns imaginary."""


class StiffnessError(DKGreenError, ArithmeticError):
    pass


class UnderflowError(DKGreenError, ArithmeticError):
    pass


class NearPole(DKGreenError, ArithmeticError):
    """Wronskian too small to build a resolvent from."""


class ConfigError(DKGreenError, ValueError):
    pass
