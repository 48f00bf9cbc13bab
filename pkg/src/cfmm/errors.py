"""Exception hierarchy shared by every module."""


class CfmmError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CfmmError, ValueError):
    """An input lies outside the domain of the requested operation."""


class ModelError(CfmmError, ValueError):
    """Invalid model parameters or an unparseable model descriptor."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class AxiomViolation(CfmmError):
    """The model breaks an axiom the requested computation depends on."""

    def __init__(self, message: str, axiom: str, witness=None):
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness


class InfeasiblePooling(CfmmError):
    """No injection in the requested asset reproduces the current price."""

    def __init__(self, message: str, price_range: tuple[float, float]):
        super().__init__(message)
        self.price_range = price_range


class IntegrationFailure(CfmmError):
    """The fee ODE could not be advanced (typically reserve exhaustion)."""

    def __init__(self, message: str, s: float, value: float):
        super().__init__(message)
        self.s = s
        self.value = value


class UnreachablePrice(CfmmError):
    """A target price is outside the range the pool oracle can reach."""
