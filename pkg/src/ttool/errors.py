"""Error types raised by the t-product algebra.

Each class corresponds to one failure mode of the library and maps to a
single CLI exit code (see ``ttool.cli``).
"""


class TensorError(Exception):
    """Base class for all library errors."""


class ShapeError(TensorError):
    """Operand dimensions do not match the operation's contract."""


class StructureError(TensorError):
    """A matrix expected to carry block-circulant structure does not."""


class SingularError(TensorError):
    """A Fourier block (or the whole operator) is numerically singular."""

    def __init__(self, message, block_index=None):
        super().__init__(message)
        # 1-based index of the first offending Fourier block, when known
        self.block_index = block_index


class PivotError(TensorError):
    """Unpivoted elimination hit a zero pivot."""

    def __init__(self, message, block_index=None, step=None):
        super().__init__(message)
        self.block_index = block_index
        self.step = step


class RadiusError(TensorError):
    """Spectral radius violates a series' convergence requirement."""

    def __init__(self, message, modulus=None):
        super().__init__(message)
        # largest offending T-eigenvalue modulus
        self.modulus = modulus


class DomainError(TensorError):
    """A scalar function was evaluated outside its domain on the spectrum."""


class IllConditionedError(TensorError):
    """Requested structure is numerically unreliable for this input."""


class NotHermitianError(TensorError):
    """Operation requires a Hermitian tensor."""


class NotCommutingError(TensorError):
    """Operation requires a commuting family."""


class NotDiagonalizableError(TensorError):
    """Operation requires an F-diagonalizable tensor."""


class ConvergenceError(TensorError):
    """An iterative kernel failed to converge."""


class TIndexError(TensorError):
    """The tensor's T-index violates the operation's precondition."""

    def __init__(self, message, t_index=None):
        super().__init__(message)
        self.t_index = t_index
