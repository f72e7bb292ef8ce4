"""Design-space surrogates and bi-objective search."""

from sehs.optimize.kriging import KrigingModel, kriging_fit, kriging_predict
from sehs.optimize.nsga2 import (
    ParetoSet,
    crowding_distance,
    dominates,
    fast_nondominated_sort,
    hypervolume_2d,
    nsga2,
)

__all__ = [
    "KrigingModel",
    "ParetoSet",
    "crowding_distance",
    "dominates",
    "fast_nondominated_sort",
    "hypervolume_2d",
    "kriging_fit",
    "kriging_predict",
    "nsga2",
]
