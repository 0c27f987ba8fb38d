"""Multiobjective insecticide control of a dengue outbreak model.

Simulation of the SEIR+ASEI transmission model, the DDMOA2 hybrid
optimizer, five comparison algorithms, hypervolume metrics and the
experiment harness.
"""

from .core import (
    EvaluationBudget,
    FrontArchive,
    RunResult,
    Solution,
    dominates,
    generate_weights,
    make_rng,
    nondominated_filter,
)
from .metrics import aggregate_runs, hypervolume_2d, total_hypervolume
from .model import (
    DEFAULT_PARAMETERS,
    INITIAL_STATE,
    EpidemicState,
    ModelParameters,
    ObjectiveVector,
    ScalarCostWeights,
    Trajectory,
    derivative,
    evaluate_objectives,
    integrate_rk4,
    scalar_cost,
)
from .problems import BiSphere, DengueProblem

__version__ = "0.1.0"
