"""Shared exception types for solver and data-construction failure modes."""


class InvalidParameterError(ValueError):
    """Raised when a parameter set is outside the model's admissible range."""


class GridMismatchError(ValueError):
    """Raised when fields on different grids are combined."""


class FrequencyOverflowError(ValueError):
    """Requested carrier frequency does not fit under the dealias cap.

    Carries ``max_feasible_n``, the largest admissible mode index on the grid.
    """

    def __init__(self, message, max_feasible_n=None):
        super().__init__(message)
        self.max_feasible_n = max_feasible_n


class CFLError(RuntimeError):
    """Raised when the advective CFL guard fails at runtime.

    Carries ``time``, the simulation time at which the guard tripped.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class BlowUpError(RuntimeError):
    """Raised when the solution exceeds the blow-up threshold or loses finiteness.

    Carries ``time``, the last time with a valid state.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DiffeomorphismError(RuntimeError):
    """Raised when the particle map loses strict monotonicity (y_xi <= 0).

    Carries ``time`` when raised during time stepping.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
