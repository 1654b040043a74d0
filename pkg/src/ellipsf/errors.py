"""Named failure modes raised across the package."""


class EllipsfError(Exception):
    """Base class for all package errors."""


class NotIsotropic(EllipsfError):
    """The dilation matrix is not diagonalizable with equal eigenvalue moduli."""


class NotDilation(EllipsfError):
    """The matrix is singular, non-integer, or has an eigenvalue of modulus <= 1."""


class NoPositiveDefiniteSolution(EllipsfError):
    """The invariance equation admits no positive definite solution."""


class AmbiguousSolution(EllipsfError):
    """The invariance equation has several independent solutions and no canonical pick."""


class RationalizationFailure(EllipsfError):
    """A numerically obtained matrix could not be recognised as rational."""


class FactorizationGap(EllipsfError):
    """A lattice point admits no unique coset factorization within the search bound."""


class UnsupportedShiftDenominator(EllipsfError):
    """A coset shift produces a phase outside the fourth roots of unity."""


class GVanishesAtCoset(EllipsfError):
    """The normalizing product of G over non-zero cosets is zero."""


class NonPeriodicMask(EllipsfError):
    """The constructed mask is not 2*pi periodic in every variable."""


class ConditionFailed(EllipsfError):
    """The kernel condition required for a non-stationary family is not met."""


class OrderExceedsBound(EllipsfError):
    """The reproduced space still grows at the largest degree examined."""


class DefinitionMismatch(EllipsfError):
    """The two characterisations of the Strang-Fix order disagree."""


class NoStabilization(EllipsfError):
    """The kernel did not stabilise while enlarging the lattice window."""


class Divergence(EllipsfError):
    """The cascade iteration is not converging."""


class UnderdeterminedCorrection(EllipsfError):
    """No sine-monomial correction reproduces the required jet."""


class UnsupportedGroupOrder(EllipsfError):
    """The normalized powers of the dilation do not form a group of order 1 or 2."""
