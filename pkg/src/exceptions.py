"""Custom exceptions."""


class ScenarioConfigException(Exception):
    """Custom exception class related to scenario configuration and presets."""

    def __init__(self, message: str):
        """
        Initialize the ScenarioConfigException instance.

        :param message: The error message associated with the exception.
        :type message: str
        """
        super().__init__(message)


class ProblemException(Exception):
    """Custom exception class for inputs violating a model precondition."""

    def __init__(self, message: str):
        """
        Initialize the ProblemException instance.

        :param message: The error message associated with the exception.
        :type message: str
        """
        super().__init__(message)


class NumericalException(Exception):
    """Custom exception class for root finding, LP and invariant failures."""

    def __init__(self, message: str):
        """
        Initialize the NumericalException instance.

        :param message: The error message associated with the exception.
        :type message: str
        """
        super().__init__(message)


class QuadratureException(NumericalException):
    """Custom exception class raised when adaptive quadrature does not converge."""

    def __init__(self, message: str):
        """
        Initialize the QuadratureException instance.

        :param message: The error message associated with the exception.
        :type message: str
        """
        super().__init__(message)
