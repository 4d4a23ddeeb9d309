"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function or distribution."""


class DegenerateWindowError(ValueError):
    """A signal window carries no usable information (empty or all zeros)."""
