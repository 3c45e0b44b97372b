from typing import List, Optional, Tuple


class StereoBudgetError(Exception):
    """Base class for every error raised by stereobudget"""


class DomainError(StereoBudgetError, ValueError):
    """An input lies outside the domain of a projection, pose or formula"""


class NoSolutionError(DomainError):
    """A disparity cannot be produced by any range at the given bearing"""

    def __init__(self, message: str, achievable: Tuple[float, float]):
        super().__init__(f"{message} (achievable disparity: {achievable[0]:.6g}..{achievable[1]:.6g} px)")
        self.achievable = achievable


class ConfigError(StereoBudgetError):
    """Scenario config could not be parsed or failed validation"""

    def __init__(self, errors: List[str], source: Optional[str] = None):
        self.errors = list(errors)
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(prefix + "; ".join(self.errors))


class OracleError(StereoBudgetError):
    """Numeric oracle could not produce a trustworthy estimate"""


class SweepError(StereoBudgetError):
    """Every row of a sweep failed"""
