"""
Exception types for the Bogoliubov toolkit.
Each class name doubles as the machine-readable failure reason reported by the CLI.
"""


class BogoliubovError(Exception):
    """Base class for all toolkit failures."""

    @property
    def reason(self) -> str:
        return type(self).__name__


class ParseError(BogoliubovError):
    """Input document could not be decoded."""


class DimensionMismatch(BogoliubovError):
    pass


class NonFiniteEntry(BogoliubovError):
    pass


class StatisticsMismatch(BogoliubovError):
    pass


class UnsupportedTarget(BogoliubovError):
    pass


class NotValidated(BogoliubovError):
    """The map does not satisfy the Bogoliubov relations within tolerance."""


class DegenerateBasis(BogoliubovError):
    pass


class NotBosonic(BogoliubovError):
    pass


class NotFermionic(BogoliubovError):
    pass


class UnpairedEigenvector(BogoliubovError):
    """A fermionic eigenspace with 0 < mu^2 < 1 has odd dimension."""


class UnknownTail(BogoliubovError):
    """An infinite family carries no tail declaration to decide convergence."""


class PrereqFailed(BogoliubovError):
    pass


class BadCutoff(BogoliubovError):
    pass


class BadParameter(BogoliubovError):
    pass


class BadSteps(BogoliubovError):
    pass


class SymmetryViolation(BogoliubovError):
    pass


class NotPositive(BogoliubovError):
    pass


class GramTooLarge(BogoliubovError):
    """||h^{-1/2} k h^{-1/2}|| is not strictly below one."""


class NoConvergence(BogoliubovError):
    pass


class OddKernel(BogoliubovError):
    pass


class ConstraintViolated(BogoliubovError):
    pass


class ZeroGap(BogoliubovError):
    pass
