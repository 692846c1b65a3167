"""somosq: exact verification of Somos-sequence identities and the
birational geometry of their invariant varieties."""

__version__ = "0.1.0"

from .algebra import (  # noqa: F401
    AlgebraError,
    Monomial,
    NotDivisibleError,
    NotHomogeneousError,
    Polynomial,
    RationalFunction,
    VariableMismatchError,
    poly_gcd,
    poly_lcm,
    projective_ring,
    ring,
)
