"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A parameter or configuration value violates its contract."""


class PoleError(ValueError):
    """Evaluation was requested exactly at a pole (z coincides with a root)."""


class RootFindError(RuntimeError):
    """The simultaneous root iteration did not certify all roots."""


class QuadratureError(RuntimeError):
    """A quadrature rule could not be placed safely (persistent node clash)."""


class HypothesisViolation(ValueError):
    """Inputs fall outside the hypothesis of the bound being evaluated."""


class DegenerateDistributionError(ValueError):
    """The (transformed) sampling distribution is a point mass."""


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the full list of problems."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
