from ._version import version as __version__  # noqa: F401
from .excpt import (PairVarError, DataError, NumericalError,  # noqa: F401
                    ConfigError)
from .model import (VarianceModel, PairedDataset,  # noqa: F401
                    load_pairs, pair_stats, variance_at,
                    estimating_equation_bias)
from .macl import macl_fit, mle_homoscedastic  # noqa: F401
from .mixture_em import build_support, em_fit, fit_mixture  # noqa: F401
from . import hypothesis  # noqa: F401
from . import intervals  # noqa: F401
from . import simulate  # noqa: F401
