"""Comparison optimizers sharing the operators of :mod:`dengue_moo.core`."""

from . import gde3, ibea, moead, nsga2, smpso
from .gde3 import Gde3Config
from .ibea import IbeaConfig, epsilon_indicator
from .moead import MoeadConfig
from .nsga2 import Nsga2Config
from .smpso import SmpsoConfig
from .sorting import crowding_distance, fast_nondominated_sort

__all__ = [
    "Gde3Config",
    "IbeaConfig",
    "MoeadConfig",
    "Nsga2Config",
    "SmpsoConfig",
    "crowding_distance",
    "epsilon_indicator",
    "fast_nondominated_sort",
    "gde3",
    "ibea",
    "moead",
    "nsga2",
    "smpso",
]
