"""Exception hierarchy. Each family maps to a distinct CLI exit code."""


class SGPNError(Exception):
    exit_code = 1


class ModelParseError(SGPNError):
    """Model document is not valid JSON or does not match the schema."""

    exit_code = 2


class NetValidationError(SGPNError):
    """Net violates a structural rule, or an operation's structural precondition."""

    exit_code = 3

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ConfigurationError(NetValidationError):
    """Catalog metadata (state tags, keys) is missing or inconsistent."""


class TransitionNotEnabled(NetValidationError):
    pass


class SolverError(SGPNError):
    exit_code = 4


class NoInteriorEquilibrium(SolverError):
    pass


class DegenerateGame(NoInteriorEquilibrium):
    """A player is indifferent between both actions for every opponent strategy.

    ``indifferent`` lists the affected players; for those, any strategy is a
    best response, so no specific mixing probability is reported.
    """

    def __init__(self, message, indifferent):
        super().__init__(message)
        self.indifferent = tuple(indifferent)


class PureEquilibriumRegime(SolverError):
    """The indifference solution lies outside [0, 1]."""

    def __init__(self, message, p_attack, p_defend):
        super().__init__(message)
        self.p_attack = p_attack
        self.p_defend = p_defend


class NumericalError(SGPNError):
    exit_code = 5


class ConvergenceError(NumericalError):
    pass


class DegenerateModelError(NumericalError):
    pass
