"""Mean-variance bounds for sums of independent random variables."""

from .core import (
    DEFAULT_CONFIG,
    BoundKind,
    BoundReport,
    MomentSpec,
    NumericConfig,
    ShiftedSpec,
    TwoPointDistribution,
    make_two_point,
    range_of,
)
from .hetero import HeteroSumSpec, equal_range_tail_lower, hetero_loss_upper
from .iid import (
    SumSpec,
    aggregate_abs_upper,
    aggregate_tail_lower,
    improved_left_tail_lower,
    improved_tail_lower,
    percentile_envelope,
)
from .loss import abs_sum_upper, loss_objective, optimal_loss_bound, thresholds
from .single import (
    SingleBoundInput,
    cantelli_tail_lower,
    scarf_abs_upper,
    scarf_expected_loss_upper,
    tighter_scarf_loss_upper,
)

__version__ = "0.1.0"
