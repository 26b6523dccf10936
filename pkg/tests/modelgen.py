"""Random cumulant models for property tests."""

import numpy as np

from chi2corr.corrections import CumulantModel
from chi2corr.tensors import random_orthonormal, symmetrize


def frame_model(rng, p, k, n=1, scale=1.0):
    """Model in its diagonal frame: v0 = diag(1..1, 0..0), higher cumulants on the first k axes."""
    k3 = np.zeros((p,) * 3)
    k4 = np.zeros((p,) * 4)
    k3[:k, :k, :k] = scale * symmetrize(rng.standard_normal((k,) * 3))
    k4[:k, :k, :k, :k] = scale * symmetrize(rng.standard_normal((k,) * 4))
    v1 = symmetrize(rng.standard_normal((p, p)))
    mu1 = rng.standard_normal(p)
    v0 = np.diag([1.0] * k + [0.0] * (p - k))
    return CumulantModel(n, mu1, v0, v1, k3, k4)


def random_model(rng, p, k, n=1):
    """A frame model rotated by a random orthonormal matrix, and that matrix."""
    r = random_orthonormal(p, rng)
    base = frame_model(rng, p, k, n)
    # rotated() applies Z = R X; use R^T so that R maps the model back to its frame
    model = base.rotated(r.T)
    return _symmetrized(model), base, r


def _symmetrized(model):
    return CumulantModel(model.n, model.mu1, symmetrize(model.v0), symmetrize(model.v1),
                         symmetrize(model.k3), symmetrize(model.k4))
