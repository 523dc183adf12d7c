"""
Exception hierarchy for leastgrad.
"""


class LeastGradError(Exception):
    """Base class for every error raised by leastgrad."""


class ConfigError(LeastGradError):
    """Invalid or unresolvable experiment configuration."""


class EmptyInterior(LeastGradError):
    """The shape yields no interior cell at the requested spacing."""


class DisconnectedInterior(LeastGradError):
    """The interior mask has more than one face-connected component."""


class DisconnectedBoundary(LeastGradError):
    """The boundary layer of the interior is not connected."""


class DomainMismatch(LeastGradError):
    """Two grid objects live on different domains."""


class DegenerateElement(LeastGradError):
    """A surface element has zero (or negative) size."""


class CapacityOverflow(LeastGradError):
    """Edge capacities cannot be quantized to positive integers."""


class TooLarge(LeastGradError):
    """The exhaustive oracle was asked to enumerate too many cells."""


class BallTooSmall(LeastGradError):
    """The barrier ball radius does not exceed two grid spacings."""


class BallCoversDomain(LeastGradError):
    """The barrier ball contains every interior cell."""


class NestednessViolation(LeastGradError):
    """A level-set family is not decreasing in the level."""


class NonConvergence(LeastGradError):
    """An iterative solver stopped before reaching its tolerance."""


class SingularJacobian(LeastGradError):
    """The Newton system could not be solved."""


class TestFunctionNotCompactlySupported(LeastGradError):
    """A test function does not vanish on the patch boundary."""

    __test__ = False


class HypothesisViolated(LeastGradError):
    """Inputs of a comparison test do not satisfy its hypotheses."""
