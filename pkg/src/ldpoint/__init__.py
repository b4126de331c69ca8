"""Large deviations of heavy-tailed linear processes via point-process limits."""

__version__ = "0.1.0"

from .config import ConfigError, ExperimentConfig, dump_config, load_config, parse_config
from .estimate import (
    Hitting,
    OrderStats,
    PartialSum,
    estimate_events,
    estimate_exceedance,
    estimate_hitting,
    estimate_marginal_tail,
    estimate_order_stats,
    estimate_partial_sum,
    estimate_ruin,
    oracle_exact,
    tilted_estimator,
)
from .limits import (
    LimitConstant,
    hitting_constant,
    marginal_tail_constant,
    order_stat_constant,
    partial_sum_constant,
    ruin_constant,
)
from .noise import LawError, RegVarLaw
from .pointproc import (
    AnnulusTestFn,
    NormalizationPlan,
    PlanError,
    PointMeasure,
    SupportError,
    build_point_measure,
    empirical_F_mc,
    eval_F,
    limit_F_mc,
    make_plan,
    metric_d,
)
from .process import (
    IID,
    SRE,
    ConditionError,
    DiscreteLaw,
    MovingAverage,
    RandomCoefMA,
    StochVol,
    VectorLaw,
    simulate_path,
    validate_conditions,
)
from .rng import Stream
from .stats import Estimate
