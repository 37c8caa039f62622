class ConfigError(ValueError):
    """Invalid experiment or algorithm parameters."""


class ContractError(ValueError):
    """Inputs that violate an operation's shape or size contract."""


class NumericalError(ArithmeticError):
    """A linear system too ill-conditioned to solve reliably."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number
