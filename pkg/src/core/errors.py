"""Simulator exception hierarchy."""

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


class SimulationException(Exception):
    """Base simulator exception."""

    def __init__(self, detail: str, code: str, exit_code: int = EXIT_NUMERICAL_ERROR):
        self.detail = detail
        self.code = code
        self.exit_code = exit_code
        super().__init__(self.detail)


class InvalidParameterException(SimulationException):
    """An operation was called outside its preconditions."""

    def __init__(self, detail: str):
        super().__init__(detail, "INVALID_PARAMETER", EXIT_CONFIG_ERROR)


class ProblemTooLargeException(SimulationException):
    """Requested Hilbert space exceeds the configured size limit."""

    def __init__(self, detail: str):
        super().__init__(detail, "PROBLEM_TOO_LARGE", EXIT_CONFIG_ERROR)


class ConfigurationException(SimulationException):
    """Run configuration could not be loaded."""

    def __init__(self, detail: str):
        super().__init__(detail, "CONFIG_ERROR", EXIT_CONFIG_ERROR)


class NumericalException(SimulationException):
    """Decomposition failure or violated conservation law."""

    def __init__(self, detail: str):
        super().__init__(detail, "NUMERICAL_ERROR", EXIT_NUMERICAL_ERROR)
