"""Exception types shared across the package."""


class StructureError(ValueError):
    """Operands belong to different algebras or have mismatched shapes."""


class ContractViolationError(ValueError):
    """A precondition on arguments was violated (bad exponents, non-Hermitian input, ...)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or met unexpected conditioning."""


class DegenerateInputError(ValueError):
    """An input is degenerate (zero operator) where a ratio is requested."""
