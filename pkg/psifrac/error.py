from __future__ import annotations

import typing as t


__all__ = [
    "CosineZeroError",
    "DomainError",
    "ExtrapolationError",
    "GammaOverflowError",
    "InnerSingularityError",
    "InvalidConfigError",
    "InvalidDomainError",
    "InvalidParameterError",
    "MissingParameterError",
    "NonConvergenceError",
    "NonDifferentiableError",
    "NonfiniteSampleError",
    "OutOfRangeError",
    "ParseError",
    "PoleError",
    "PsiFracError",
    "StepUnderflowError",
    "UnknownIdentifierError",
    "UnknownNameError",
]


EXIT_USAGE = 2
EXIT_NUMERIC = 3


class PsiFracError(Exception):
    """Base class of all errors raised by the package.

    Subclasses only override class attributes; the CLI maps every error
    to the exit status of its family.
    """

    exit_code: int = EXIT_NUMERIC
    """Exit status the CLI returns when this error aborts a command."""


# Usage errors: the request itself is malformed.

class InvalidConfigError(PsiFracError):
    """Raised if a configuration object is out of its valid range."""

    exit_code = EXIT_USAGE


class InvalidParameterError(PsiFracError):
    """Raised if an order, type or preset parameter is invalid."""

    exit_code = EXIT_USAGE


class InvalidDomainError(PsiFracError):
    """Raised if an interval is empty or incompatible with a preset."""

    exit_code = EXIT_USAGE


class ParseError(PsiFracError):
    """Raised if an expression text cannot be parsed.

    Args:
        offset: 0-based byte offset of the offending token.
        message: Description of what was expected.
    """

    exit_code = EXIT_USAGE

    def __init__(self, offset: int, message: str) -> None:
        super().__init__(offset, message)
        self.offset = offset
        self.message = message

    def __str__(self) -> str:
        return f"parse error at byte {self.offset}: {self.message}"


class UnknownIdentifierError(ParseError):
    """Raised if an expression refers to an unknown name."""

    def __init__(self, offset: int, name: str) -> None:
        super().__init__(offset, f"unknown identifier '{name}'")
        self.name = name


class UnknownNameError(PsiFracError):
    """Raised if a catalog name is not registered."""

    exit_code = EXIT_USAGE


class MissingParameterError(PsiFracError):
    """Raised if a catalog preset lacks one of its required parameters."""

    exit_code = EXIT_USAGE


# Numeric errors: the request is well formed but cannot be evaluated.

class DomainError(PsiFracError):
    """Raised if a function is evaluated outside its domain.

    Args:
        func: Name of the offending function or operator.
        arg: Offending argument value.
        detail: Optional free-form explanation.
    """

    def __init__(
        self,
        func: str,
        arg: t.Optional[float] = None,
        detail: str = "",
    ) -> None:
        self.func = func
        self.arg = arg
        self.detail = detail
        text = f"domain error in {func}"
        if arg is not None:
            text += f" at argument {arg!r}"
        if detail:
            text += f": {detail}"
        super().__init__(text)


class PoleError(DomainError):
    """Raised if Gamma is evaluated at a nonpositive integer."""

    def __init__(self, arg: float) -> None:
        super().__init__("gamma", arg, "pole at nonpositive integer")


class InnerSingularityError(DomainError):
    """Raised if a composed boundary term of a Hilfer derivative diverges."""
    pass


class GammaOverflowError(PsiFracError):
    """Raised if Gamma overflows the double range."""
    pass


class NonConvergenceError(PsiFracError):
    """Raised if a series fails to converge within its term budget."""
    pass


class NonDifferentiableError(PsiFracError):
    """Raised if an expression has no registered derivative rule."""
    pass


class OutOfRangeError(PsiFracError):
    """Raised if an argument lies outside the supported range."""
    pass


class NonfiniteSampleError(PsiFracError):
    """Raised if an integrand returns a nonfinite value at a node.

    Args:
        abscissa: Node in the integration variable where the value was
            not finite.
    """

    def __init__(self, abscissa: float) -> None:
        super().__init__(f"nonfinite integrand value at s={abscissa!r}")
        self.abscissa = abscissa


class StepUnderflowError(PsiFracError):
    """Raised if a difference step would leave the domain."""
    pass


class ExtrapolationError(PsiFracError):
    """Raised if an endpoint limit does not stabilize."""
    pass


class CosineZeroError(PsiFracError):
    """Raised if a Riesz normalization cos(pi*alpha/2) vanishes."""
    pass
