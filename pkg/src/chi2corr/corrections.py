"""Cumulant models and the four 1/n correction constants.

A model describes a p-vector statistic ``X`` whose cumulants expand as

    E X        = mu1 / sqrt(n) + ...
    Cov X      = v0 + v1 / n + ...
    cum3(X)    = k3 / sqrt(n) + ...
    cum4(X)    = k4 / n + ...

with ``v0`` idempotent of trace ``k``. The distribution of ``T = X^T X`` is then
chi-squared with ``k`` degrees of freedom plus corrections governed by
``a``, ``b``, ``c`` (shape) and ``d`` (location shift).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, IdempotencyError, SchemaError
from .spectral import IDEMPOTENCY_GATE, SpectralSplit, idempotency_residual, split_idempotent
from .tensors import rotate, rotate2, rotate_vector, validate_symmetry


def _frozen(a, name: str, rank: int, p: int) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.shape != (p,) * rank:
        raise DimensionError(f"{name} must have shape {(p,) * rank}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SchemaError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CumulantModel:
    n: int
    mu1: np.ndarray
    v0: np.ndarray
    v1: np.ndarray
    k3: np.ndarray
    k4: np.ndarray
    p: int = field(init=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise SchemaError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        mu1 = np.asarray(self.mu1, dtype=float)
        if mu1.ndim != 1 or mu1.size == 0:
            raise DimensionError(f"mu1 must be a non-empty vector, got shape {mu1.shape}")
        p = mu1.shape[0]
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "mu1", _frozen(mu1, "mu1", 1, p))
        for name, rank in (("v0", 2), ("v1", 2), ("k3", 3), ("k4", 4)):
            arr = _frozen(getattr(self, name), name, rank, p)
            object.__setattr__(self, name, arr)
            validate_symmetry(arr).raise_if_failed(name)
        resid = idempotency_residual(self.v0)
        if resid > IDEMPOTENCY_GATE:
            raise IdempotencyError(
                f"v0 is not idempotent: max |v0 @ v0 - v0| = {resid:.3g}", residual=resid)

    def with_n(self, n: int) -> "CumulantModel":
        return CumulantModel(n, self.mu1, self.v0, self.v1, self.k3, self.k4)

    def rotated(self, r) -> "CumulantModel":
        """The same statistic expressed in the frame ``Z = R X``."""
        return CumulantModel(self.n, rotate_vector(self.mu1, r), rotate2(self.v0, r),
                             rotate2(self.v1, r), rotate(self.k3, r), rotate(self.k4, r))

    def __eq__(self, other):
        if not isinstance(other, CumulantModel):
            return NotImplemented
        return self.n == other.n and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("mu1", "v0", "v1", "k3", "k4"))


@dataclass(frozen=True)
class CorrectionConstants:
    a: float
    b: float
    c: float
    d: float
    k: int
    n: int


def _check_split(model: CumulantModel, split: SpectralSplit) -> None:
    if split.p != model.p:
        raise DimensionError(f"rotation has dimension {split.p}, model has p = {model.p}")


def _rotated_second_order(model: CumulantModel, split: SpectralSplit) -> np.ndarray:
    """Per-coordinate ``V1~_ii + mu~_i^2`` in the rotated frame."""
    _check_split(model, split)
    v1 = rotate2(model.v1, split.r)
    mu = rotate_vector(model.mu1, split.r)
    return np.diag(v1) + mu**2


def compute_a(model: CumulantModel, split: SpectralSplit) -> float:
    terms = _rotated_second_order(model, split)
    return float(terms[: split.k].sum() / (2 * model.n))


def compute_d(model: CumulantModel, split: SpectralSplit) -> float:
    # divisor is n, not 2n: d is a plain shift of T
    terms = _rotated_second_order(model, split)
    return float(terms[split.k:].sum() / model.n)


def compute_b(model: CumulantModel) -> float:
    """``sum_ij (k4_iijj + 4 mu_i k3_ijj) / 8n`` in the original frame."""
    k4_trace = np.einsum("iijj->", model.k4)
    mixed = model.mu1 @ np.einsum("ijj->i", model.k3)
    return float((k4_trace + 4 * mixed) / (8 * model.n))


def compute_c(model: CumulantModel) -> float:
    """``sum_ijl k3_ijl^2 / 12n + sum_i (sum_j k3_ijj)^2 / 8n``."""
    full = np.sum(model.k3**2)
    v = np.einsum("ijj->i", model.k3)
    return float(full / (12 * model.n) + (v @ v) / (8 * model.n))


def null_space_leakage(model: CumulantModel, split: SpectralSplit) -> float:
    """Largest rotated k3/k4 entry with any index in the null space of v0.

    Consistent models have these entries equal to zero; a large value means
    the higher cumulants do not match the leading covariance.
    """
    _check_split(model, split)
    k = split.k
    worst = 0.0
    for t in (rotate(model.k3, split.r), rotate(model.k4, split.r)):
        mask = np.zeros(t.shape, dtype=bool)
        for axis in range(t.ndim):
            sl = [slice(None)] * t.ndim
            sl[axis] = slice(k, None)
            mask[tuple(sl)] = True
        if mask.any():
            worst = max(worst, float(np.max(np.abs(t[mask]))))
    return worst


def compute_constants(model: CumulantModel, split: SpectralSplit | None = None) -> CorrectionConstants:
    if split is None:
        split = split_idempotent(model.v0)
    return CorrectionConstants(
        a=compute_a(model, split),
        b=compute_b(model),
        c=compute_c(model),
        d=compute_d(model, split),
        k=split.k,
        n=model.n,
    )
