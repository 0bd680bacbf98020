"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid user input: malformed text, bad parameters, dimension mismatches."""


class UnsupportedNormOperation(InputError):
    """The requested operation has no exact closed form for this norm variant."""


class CapacityError(RuntimeError):
    """An enumeration would exceed the configured size limit."""


class PerturbationError(RuntimeError):
    """The witness perturbation schedule was exhausted without an acceptable candidate."""
