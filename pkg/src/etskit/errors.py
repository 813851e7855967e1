"""Exception types shared across the toolkit."""


class EtskitError(Exception):
    """Base class for all toolkit errors."""


class InputError(EtskitError):
    """An argument does not fit the system it is used against."""


class UnknownIdentifierError(InputError):
    """A state, agent, vote, or lemma name that no registry resolves."""


class CapacityError(EtskitError):
    """An explicit resource cap was hit (never a silent truncation)."""


class FormulaSyntaxError(EtskitError):
    """Formula text rejected; carries a character position."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class SystemFormatError(EtskitError):
    """System file rejected; messages carry line numbers."""


class ClaimsFormatError(EtskitError):
    """Claims file rejected; messages carry line numbers."""


class ProofFormatError(EtskitError):
    """Proof script or lemma registry rejected; messages carry line numbers."""
