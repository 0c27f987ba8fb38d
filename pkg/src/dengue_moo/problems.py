"""Box-constrained biobjective problems the optimizers run on."""

from __future__ import annotations

import numpy as np

from .model import DEFAULT_PARAMETERS, HORIZON_DAYS, N_STEPS, ModelParameters, evaluate_many


class DengueProblem:
    """Insecticide schedule on the 1001-node grid versus (infected, spraying) cost."""

    name = "dengue"

    def __init__(self, params: ModelParameters = DEFAULT_PARAMETERS, horizon: float = HORIZON_DAYS, steps: int = N_STEPS):
        self.params = params
        self.horizon = float(horizon)
        self.n_var = steps + 1
        self.lower = np.zeros(self.n_var)
        self.upper = np.ones(self.n_var)
        self.ref_point = np.array([3.0, 80.0])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return evaluate_many(x[None, :], self.params, self.horizon)[0]

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        return evaluate_many(X, self.params, self.horizon)


class BiSphere:
    """Two squared distances to distinct centers in ``[0, 1]^n``.

    The Pareto set is the segment between the centers; on it
    ``f1 = t² d²`` and ``f2 = (1 - t)² d²`` for ``t ∈ [0, 1]``, with ``d`` the
    distance between centers.
    """

    name = "bisphere"

    def __init__(self, n_var: int = 2, center_a=None, center_b=None):
        self.n_var = n_var
        self.center_a = np.full(n_var, 0.3) if center_a is None else np.asarray(center_a, dtype=np.float64)
        self.center_b = np.full(n_var, 0.7) if center_b is None else np.asarray(center_b, dtype=np.float64)
        self.lower = np.zeros(n_var)
        self.upper = np.ones(n_var)
        self.ref_point = np.array([1.0, 1.0])

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.array([np.sum((x - self.center_a) ** 2), np.sum((x - self.center_b) ** 2)])

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        return np.column_stack(
            [np.sum((X - self.center_a) ** 2, axis=1), np.sum((X - self.center_b) ** 2, axis=1)]
        )

    def distance_to_pareto_set(self, X: np.ndarray) -> np.ndarray:
        """Euclidean distance of each decision vector to the center segment."""
        X = np.atleast_2d(X)
        d = self.center_b - self.center_a
        t = np.clip((X - self.center_a) @ d / (d @ d), 0.0, 1.0)
        closest = self.center_a + t[:, None] * d
        return np.linalg.norm(X - closest, axis=1)

    def distance_to_front(self, F: np.ndarray, samples: int = 20001) -> np.ndarray:
        """Objective-space distance of each point to the sampled analytic front."""
        F = np.atleast_2d(F)
        d2 = float(np.sum((self.center_b - self.center_a) ** 2))
        t = np.linspace(0.0, 1.0, samples)
        curve = np.column_stack([t**2 * d2, (1 - t) ** 2 * d2])
        dist = np.sqrt(((F[:, None, :] - curve[None, :, :]) ** 2).sum(axis=2))
        return dist.min(axis=1)
