"""Exceptions and warnings used throughout pairvar

The command-line interface maps :class:`DataError` to exit code 3,
:class:`NumericalError` to exit code 4 and :class:`ConfigError`
to exit code 2.
"""


class PairVarError(Exception):
    """Base class for all pairvar errors"""
    pass


class ConfigError(PairVarError, ValueError):
    """Invalid configuration or command-line usage"""
    pass


class DataError(PairVarError, ValueError):
    """Invalid input data (e.g. a non-finite intensity in row 12)"""
    pass


class DomainError(PairVarError, ValueError):
    """A variance function was evaluated outside of its domain"""
    pass


class NumericalError(PairVarError, ArithmeticError):
    """A numerical procedure failed"""
    pass


class EvaluationError(NumericalError):
    """A variance function evaluated to a non-finite value"""
    pass


class ConvergenceError(NumericalError):
    def __init__(self, msg, theta=None, residual=None, iterations=None):
        """An iterative solver did not converge

        Parameters
        ----------
        msg: str
            Error message
        theta: 1d ndarray or None
            Best iterate found by the solver
        residual: float or None
            Max-norm of the estimating equations at `theta`
        iterations: int or None
            Number of iterations performed
        """
        super(ConvergenceError, self).__init__(msg)
        self.theta = theta
        self.residual = residual
        self.iterations = iterations


class GridExplosionError(NumericalError):
    """The support grid recursion produced too many points"""
    pass


class ResponsibilityUnderflowError(NumericalError):
    """All mixture components of a pair underflow in log space"""
    pass


class EMAscentError(NumericalError):
    """The EM log-likelihood decreased (broken M-step)"""
    pass


class DegenerateSetError(NumericalError):
    """A confidence set is empty"""
    pass


class UnsupportedFormError(NumericalError):
    """The closed-form search structure does not apply to a model"""
    pass


class StudyError(NumericalError):
    """Too many replicates of a simulation study failed"""
    pass


class TiedPairsWarning(UserWarning):
    """Pairs with identical replicate values were dropped"""
    pass


class EmptyNuisanceSetWarning(UserWarning):
    """The nuisance confidence set does not intersect the bounds"""
    pass


class GridInversionWarning(UserWarning):
    """A confidence set was obtained by dense-grid inversion"""
    pass


class EmptyConfidenceSetWarning(UserWarning):
    """A confidence set of a batch row is empty within the bounds"""
    pass


class UnconvergedFitWarning(UserWarning):
    """Fits of a simulation study stopped at the iteration limit"""
    pass
