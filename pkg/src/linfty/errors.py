class InputError(ValueError):
    """Malformed or out-of-contract input."""


class NilpotencyError(InputError):
    """An exponential series could not be certified to terminate."""


class NotADerivationError(InputError):
    """A map that must act by derivations does not."""


class KernelError(RuntimeError):
    """Two routes that must agree by theorem disagreed: a defect in the kernel."""
