"""Exception hierarchy shared by the models, scanner and CLI."""


class ParameterError(ValueError):
    """Invalid physical parameters, time arguments or configuration."""


class NumericalError(ArithmeticError):
    """A computation was requested where its result is not trustworthy."""


class ConditioningError(NumericalError):
    """Survival-conditioned quantity with a vanishing normalization."""


class OutsideWindowError(ConditioningError):
    """Kaon time beyond the supported window."""
