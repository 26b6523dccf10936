"""Chi-squared baseline and the 1/n-corrected distribution of T.

With ``f_k`` the chi-squared density, the corrected CDF of ``T - d`` is

    F_k(u) + [a P2(u) + b P22(u) + c P222(u)] f_k(u)

where the bracketed polynomials come from integrating derivative-of-Gaussian
terms over a k-dimensional ball. The density follows by differentiation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize, special

from .corrections import CorrectionConstants
from .errors import NonMonotoneWarning

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000

BASES = ("P2", "P4", "P6", "P22", "P42", "P222")


def _gamma_p_series(s: float, x: float) -> float:
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))


def _gamma_q_contfrac(s: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(s, x)
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + s * math.log(x) - math.lgamma(s)) * h


def regularized_gamma_p(s: float, x: float) -> float:
    """Lower regularized incomplete gamma ``P(s, x)``.

    Series for ``x < s + 1``, continued fraction for the complement otherwise.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return _gamma_p_series(s, x)
    return 1.0 - _gamma_q_contfrac(s, x)


_vec_gamma_p = np.vectorize(regularized_gamma_p, otypes=[float])


def _unwrap(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


def chi2_cdf(u, k: int):
    """Chi-squared CDF with ``k`` degrees of freedom; 0 for ``u <= 0``."""
    u_arr = np.asarray(u, dtype=float)
    return _unwrap(_vec_gamma_p(k / 2.0, u_arr / 2.0), u)


def chi2_pdf_factor(u, k: int):
    """``u^(k/2-1) exp(-u/2) / (2^(k/2) Gamma(k/2))`` for ``u > 0``, else 0.

    The density at ``u = 0`` is defined as 0 for every ``k`` (it diverges for
    ``k = 1``).
    """
    u_arr = np.asarray(u, dtype=float)
    out = np.zeros_like(u_arr)
    pos = u_arr > 0
    up = u_arr[pos]
    h = k / 2.0
    out[pos] = np.exp((h - 1.0) * np.log(up) - up / 2.0 - h * math.log(2.0) - math.lgamma(h))
    return _unwrap(out, u)


def basis_coefficients(basis: str, k: int) -> tuple[Fraction, Fraction, Fraction]:
    """Exact coefficients of ``u``, ``u^2``, ``u^3`` in a correction polynomial."""
    k = Fraction(k)
    quad = (Fraction(2) / k, -Fraction(2) / (k * (k + 2)), Fraction(0))
    cubic = (-Fraction(2) / k, Fraction(4) / (k * (k + 2)), -Fraction(2) / (k * (k + 2) * (k + 4)))
    table = {
        "P2": (-Fraction(2) / k, Fraction(0), Fraction(0)),
        "P22": quad,
        "P4": tuple(3 * x for x in quad),
        "P222": cubic,
        "P42": tuple(3 * x for x in cubic),
        "P6": tuple(15 * x for x in cubic),
    }
    try:
        return table[basis]
    except KeyError:
        raise ValueError(f"unknown correction basis {basis!r}; expected one of {BASES}") from None


def evaluate_basis(basis: str, u, k: int):
    """The bracketed polynomial alone; multiply by ``chi2_pdf_factor`` for the CDF term."""
    c1, c2, c3 = (float(x) for x in basis_coefficients(basis, k))
    u = np.asarray(u, dtype=float) if np.ndim(u) else float(u)
    return u * (c1 + u * (c2 + u * c3))


@dataclass(frozen=True)
class CorrectedDistribution:
    """1/n-accurate distribution of ``T`` itself (the shift ``d`` is applied internally)."""

    constants: CorrectionConstants

    def __post_init__(self):
        if self.constants.k < 1:
            raise ValueError("degrees of freedom k must be at least 1")

    @classmethod
    def from_values(cls, a=0.0, b=0.0, c=0.0, d=0.0, k=1, n=1) -> "CorrectedDistribution":
        return cls(CorrectionConstants(a, b, c, d, k, n))

    @property
    def k(self) -> int:
        return self.constants.k

    def baseline_cdf(self, u):
        return chi2_cdf(u, self.k)

    def cdf(self, u, clamp: bool = False):
        cs = self.constants
        x = np.asarray(u, dtype=float) - cs.d
        bracket = (cs.a * evaluate_basis("P2", x, cs.k)
                   + cs.b * evaluate_basis("P22", x, cs.k)
                   + cs.c * evaluate_basis("P222", x, cs.k))
        out = np.where(x > 0, chi2_cdf(x, cs.k) + bracket * chi2_pdf_factor(x, cs.k), 0.0)
        if clamp:
            out = np.clip(out, 0.0, 1.0)
        return _unwrap(out, u)

    def pdf(self, u):
        cs = self.constants
        k = cs.k
        x = np.asarray(u, dtype=float) - cs.d
        k2 = k * (k + 2)
        k4 = k2 * (k + 4)
        bracket = (1.0
                   + cs.a * (x / k - 1.0)
                   + cs.b * (x**2 / k2 - 2.0 * x / k + 1.0)
                   + cs.c * (x**3 / k4 - 3.0 * x**2 / k2 + 3.0 * x / k - 1.0))
        out = np.where(x > 0, bracket * chi2_pdf_factor(x, k), 0.0)
        return _unwrap(out, u)

    def quantile(self, alpha: float, tol: float = 1e-10, scan_points: int = 4097) -> float:
        """Smallest ``u`` with ``cdf(u) >= alpha``.

        Issues :class:`NonMonotoneWarning` if the CDF decreases anywhere on the
        scanned bracket.
        """
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
        d = self.constants.d
        hi = d + 2.0 * special.gammaincinv(self.k / 2.0, alpha)
        width = max(hi - d, 1.0)
        for _ in range(200):
            if self.cdf(hi) >= alpha:
                break
            width *= 2.0
            hi = d + width
        else:
            raise ArithmeticError(f"could not bracket the {alpha} quantile")

        grid = np.linspace(d, hi, scan_points)
        vals = self.cdf(grid)
        if np.any(np.diff(vals) < -1e-12):
            warnings.warn(
                f"corrected CDF is not monotone on [{d:.6g}, {hi:.6g}]; "
                "the correction is too large for this sample size",
                NonMonotoneWarning, stacklevel=2)
        i = int(np.argmax(vals >= alpha))
        if i == 0:
            return float(grid[0])
        return float(optimize.brentq(lambda x: self.cdf(x) - alpha, grid[i - 1], grid[i],
                                     xtol=tol, rtol=4 * np.finfo(float).eps))


def corrected_cdf(dist: CorrectedDistribution, u, clamp: bool = False):
    return dist.cdf(u, clamp=clamp)


def corrected_pdf(dist: CorrectedDistribution, u):
    return dist.pdf(u)


def corrected_quantile(dist: CorrectedDistribution, alpha: float) -> float:
    return dist.quantile(alpha)
