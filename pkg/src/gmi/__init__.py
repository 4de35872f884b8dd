"""Geometric mutual information: Friedman–Rafsky MST estimator, divergence
calculus on discrete laws, minimax proportion selection, baselines and an
experiment harness."""

__version__ = "0.1.0"

from .samples import (  # noqa: E402
    GaussianSpec,
    PairedSampleSet,
    ShuffleMode,
    SplitShuffleConfig,
    generate_gaussian,
    load_csv,
    split_and_shuffle,
)
from .mst import BACKEND, SpanningTree, euclidean_mst, mst_dualtree, mst_quadratic  # noqa: E402
from .fr import FrStatistic, GmiEstimate, estimate_gmi, estimate_gmi_trials, fr_statistic  # noqa: E402
from .divergence import (  # noqa: E402
    ConditionalJoint,
    DiscreteJoint,
    HpParams,
    affinity,
    conditional_gmi,
    gmi,
    hp_divergence,
)
from .alpha import AlphaSolution, DensityBounds, RateConstants, select_alpha  # noqa: E402
from .baselines import KdeConfig, TruthOracle, kde_gmi, mc_true_gmi  # noqa: E402

__all__ = [
    "__version__",
    "GaussianSpec",
    "PairedSampleSet",
    "ShuffleMode",
    "SplitShuffleConfig",
    "generate_gaussian",
    "load_csv",
    "split_and_shuffle",
    "BACKEND",
    "SpanningTree",
    "euclidean_mst",
    "mst_dualtree",
    "mst_quadratic",
    "FrStatistic",
    "GmiEstimate",
    "estimate_gmi",
    "estimate_gmi_trials",
    "fr_statistic",
    "ConditionalJoint",
    "DiscreteJoint",
    "HpParams",
    "affinity",
    "conditional_gmi",
    "gmi",
    "hp_divergence",
    "AlphaSolution",
    "DensityBounds",
    "RateConstants",
    "select_alpha",
    "KdeConfig",
    "TruthOracle",
    "kde_gmi",
    "mc_true_gmi",
]
