"""Exception types shared across the package."""


class InvalidDimensionError(ValueError):
    """Operator or state dimensions are invalid or do not match."""


class SimulationError(RuntimeError):
    """The integrator produced non-finite values."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class SchemaError(ValueError):
    """A data file does not match the expected schema or version."""


class TrainingError(RuntimeError):
    """Training diverged (non-finite loss)."""

    def __init__(self, message, epoch=None, batch=None, lr=None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch
        self.lr = lr
