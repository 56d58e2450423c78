"""Exception types shared across the package."""


class DomainError(ValueError):
    """An exponent or evaluation point lies outside the numerically
    meaningful domain (divergent integral, pole, prefactor singularity)."""
