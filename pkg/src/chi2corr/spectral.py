"""Diagonalization of an idempotent covariance matrix.

``split_idempotent`` returns an orthonormal ``R`` such that ``R V R^T`` is
``diag(1, ..., 1, 0, ..., 0)`` with ``k`` leading ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EigenvalueNotNearProjector,
    IdempotencyError,
    ModelError,
    NonIntegerTraceError,
)
from .tensors import validate_symmetry

IDEMPOTENCY_GATE = 1e-8
EIGEN_BAND = 1e-6
TRACE_TOL = 1e-6


@dataclass(frozen=True)
class SpectralSplit:
    r: np.ndarray
    k: int
    idempotency_residual: float
    eigen_residual: float

    @property
    def p(self) -> int:
        return self.r.shape[0]

    def with_rotation(self, r) -> "SpectralSplit":
        return SpectralSplit(np.asarray(r, dtype=float), self.k,
                             self.idempotency_residual, self.eigen_residual)


def classify_eigenvalue(lam: float, band: float = EIGEN_BAND) -> int:
    """Return 1 or 0 for an eigenvalue of a projector.

    Anything further than ``band`` from both 0 and 1 means the matrix is not a
    projector.
    """
    if abs(lam) >= band and abs(lam - 1.0) >= band:
        raise EigenvalueNotNearProjector(
            f"eigenvalue {lam!r} is not within {band:g} of 0 or 1")
    return 1 if lam > 0.5 else 0


def idempotency_residual(v0) -> float:
    v0 = np.asarray(v0, dtype=float)
    return float(np.max(np.abs(v0 @ v0 - v0)))


def _canonical_order(vecs: np.ndarray) -> np.ndarray:
    """Sign-fix and order the columns of one eigenspace basis.

    Each vector is flipped so its first largest-magnitude component is
    positive; vectors are then sorted by the position of that component.
    """
    keys = []
    out = vecs.copy()
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        mag = np.abs(v)
        lead = int(np.flatnonzero(mag >= mag.max() - 1e-9)[0])
        if v[lead] < 0:
            out[:, j] = -v
        keys.append(lead)
    order = np.argsort(keys, kind="stable")
    return out[:, order]


def split_idempotent(v0) -> SpectralSplit:
    v0 = np.asarray(v0, dtype=float)
    if v0.ndim != 2 or v0.shape[0] != v0.shape[1]:
        raise ModelError(f"v0 must be a square matrix, got shape {v0.shape}")
    validate_symmetry(v0).raise_if_failed("v0")

    resid = idempotency_residual(v0)
    if resid > IDEMPOTENCY_GATE:
        raise IdempotencyError(
            f"v0 is not idempotent: max |v0 @ v0 - v0| = {resid:.3g} "
            f"exceeds {IDEMPOTENCY_GATE:g}", residual=resid)

    trace = float(np.trace(v0))
    k = int(round(trace))
    if abs(trace - k) >= TRACE_TOL:
        raise NonIntegerTraceError(f"trace of v0 is {trace!r}, not an integer")
    if k == 0:
        raise NonIntegerTraceError("v0 has rank 0; the corrected distribution needs k >= 1")

    lam, vecs = np.linalg.eigh(v0)
    labels = np.array([classify_eigenvalue(x) for x in lam])
    if labels.sum() != k:
        raise NonIntegerTraceError(
            f"v0 has {labels.sum()} unit eigenvalues but trace {trace!r}")
    eigen_resid = float(np.max(np.minimum(np.abs(lam), np.abs(lam - 1.0))))

    ones = _canonical_order(vecs[:, labels == 1])
    zeros = _canonical_order(vecs[:, labels == 0])
    r = np.hstack([ones, zeros]).T
    return SpectralSplit(r, k, resid, eigen_resid)
