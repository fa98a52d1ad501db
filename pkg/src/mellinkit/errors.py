"""Exception hierarchy shared by every module."""


class MellinKitError(Exception):
    """Base class for all errors raised by mellinkit."""


class InvalidSpec(MellinKitError, ValueError):
    """A distribution or Levy spec carries invalid parameters."""


class OutOfDomain(MellinKitError, ValueError):
    """A Mellin argument lies outside the domain of the transform."""


class QuadratureFailure(MellinKitError, ArithmeticError):
    """An integral did not reach its tolerance within the panel budget."""


class DensityUnavailable(MellinKitError):
    """The law has no density that can be evaluated."""


class SamplerUnavailable(MellinKitError):
    """No sampler can be built for the law."""
