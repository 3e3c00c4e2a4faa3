class ConvergenceError(RuntimeError):
    """A quadrature, lattice truncation or optimizer did not reach its tolerance."""


class PreconditionError(ValueError):
    """Inputs violate a precondition of the requested bound or transform."""
