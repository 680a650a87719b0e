"""
Exception types shared by the lab packages.
Bad input raises ValueError subclasses so callers can catch them broadly.
"""
from typing import Optional


class ProfileError(ValueError):
    """Frequency profile failed validation"""


class GridError(ValueError):
    """Space-time grid is malformed or does not cover the requested region"""


class NyquistGuardError(GridError):
    """Profile sample count is too small for the requested evaluation region"""

    def __init__(self, samples: int, required: int, region: str):
        self.samples = samples
        self.required = required
        super().__init__(
            f"Nyquist guard violated for {region}: profile has M={samples} samples, "
            f"needs at least {required}"
        )


class GridBudgetError(GridError):
    """Requested grid exceeds the configured point budget"""

    def __init__(self, points: int, budget: int):
        self.points = points
        self.budget = budget
        super().__init__(f"grid budget exceeded: {points} points > {budget}")


class DecompositionError(ValueError):
    """Wave packet decomposition could not be built or broke a contract"""


class LocalizationError(DecompositionError):
    """Measured packet localization constant exceeds its bound"""


class ExponentError(ValueError):
    """Invalid exponent point or polytope operation"""


class PartitionError(RuntimeError):
    """Polynomial partition did not reach the requested balance"""

    def __init__(self, message: str, best_imbalance: Optional[float] = None):
        self.best_imbalance = best_imbalance
        if best_imbalance is not None:
            message = f"{message} (best imbalance {best_imbalance:.4f})"
        super().__init__(message)


class EnsembleError(ValueError):
    """Arc ensemble could not be synthesized or measured"""


class FitError(ValueError):
    """Power-law fit received unusable data"""
