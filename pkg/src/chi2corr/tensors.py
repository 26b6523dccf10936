"""Dense fully symmetric tensors of rank 2, 3 and 4.

Tensors are plain numpy arrays of shape ``(p,) * rank``. The helpers here
check symmetry, symmetrize, and rotate them into a new orthonormal frame
using one mode contraction per index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotOrthonormalError, SymmetryError

SYMMETRY_TOL = 1e-12
ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True)
class SymmetryReport:
    """Worst deviation from full index-permutation symmetry."""

    max_deviation: float
    index: tuple[int, ...] | None
    partner: tuple[int, ...] | None
    passed: bool

    def raise_if_failed(self, name: str = "tensor") -> None:
        if not self.passed:
            raise SymmetryError(
                f"{name} is not symmetric: entries {self.index} and {self.partner} "
                f"differ by {self.max_deviation:.3g}",
                deviation=self.max_deviation,
                index=self.index,
                partner=self.partner,
            )


def _as_square_tensor(t, rank: int | None = None) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim == 0 or len(set(t.shape)) != 1:
        raise DimensionError(f"expected a tensor with equal dimensions, got shape {t.shape}")
    if rank is not None and t.ndim != rank:
        raise DimensionError(f"expected a rank-{rank} tensor, got rank {t.ndim}")
    return t


def validate_symmetry(t, tol: float = SYMMETRY_TOL) -> SymmetryReport:
    """Compare every entry with each of its index permutations.

    An entry pair passes when ``|t[I] - t[J]| <= tol * (1 + |t[I]|)``. The
    report carries the worst absolute deviation and the index pair where it
    occurs, whether or not the check passed.
    """
    t = _as_square_tensor(t)
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor has non-finite entries")
    worst = 0.0
    worst_pair = (None, None)
    passed = True
    for perm in itertools.permutations(range(t.ndim)):
        if perm == tuple(range(t.ndim)):
            continue
        other = np.transpose(t, perm)
        diff = np.abs(t - other)
        excess = diff - tol * (1.0 + np.abs(t))
        if np.any(excess > 0):
            passed = False
        flat = int(np.argmax(diff))
        if diff.flat[flat] > worst:
            worst = float(diff.flat[flat])
            idx = np.unravel_index(flat, t.shape)
            # other[idx] == t[idx permuted by perm]
            partner = tuple(int(idx[perm.index(a)]) for a in range(t.ndim))
            worst_pair = (tuple(int(i) for i in idx), partner)
    if worst == 0.0:
        worst_pair = (None, None)
    return SymmetryReport(worst, worst_pair[0], worst_pair[1], passed)


def symmetrize(t) -> np.ndarray:
    """Average a tensor over all permutations of its indices."""
    t = _as_square_tensor(t)
    perms = list(itertools.permutations(range(t.ndim)))
    return sum(np.transpose(t, perm) for perm in perms) / len(perms)


def check_orthonormal(r, dim: int | None = None, tol: float = ORTHONORMAL_TOL) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise DimensionError(f"rotation must be square, got shape {r.shape}")
    if dim is not None and r.shape[0] != dim:
        raise DimensionError(f"rotation has dimension {r.shape[0]}, tensor has {dim}")
    err = np.max(np.abs(r.T @ r - np.eye(r.shape[0])))
    if err > tol:
        raise NotOrthonormalError(f"rotation is not orthonormal (max |R^T R - I| = {err:.3g})")
    return r


def rotate(t, r) -> np.ndarray:
    """Apply ``t'[i...] = sum R[i, l] ... t[l...]`` one index at a time."""
    t = _as_square_tensor(t)
    r = check_orthonormal(r, t.shape[0])
    out = t
    for axis in range(t.ndim):
        # contract axis with the second index of r, then put the new index back in place
        out = np.moveaxis(np.tensordot(r, out, axes=([1], [axis])), 0, axis)
    return out


def rotate2(m, r) -> np.ndarray:
    return rotate(_as_square_tensor(m, 2), r)


def rotate3(t, r) -> np.ndarray:
    return rotate(_as_square_tensor(t, 3), r)


def rotate4(t, r) -> np.ndarray:
    return rotate(_as_square_tensor(t, 4), r)


def rotate_vector(v, r) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    r = check_orthonormal(r, v.shape[0])
    return r @ v


def random_orthonormal(p: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthonormal matrix (QR of a Gaussian matrix, sign-fixed)."""
    q, rr = np.linalg.qr(rng.standard_normal((p, p)))
    return q * np.sign(np.diag(rr))
