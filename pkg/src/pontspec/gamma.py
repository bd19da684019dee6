"""Coupling matrices of point-interaction Hamiltonians.

Local family with centers y_1..y_n and boundary parameters alpha_1..alpha_n,
at spectral parameter lam = -E >= 0:

    [Gamma(lam)]_jj = alpha_j + sqrt(lam)/(4 pi)
    [Gamma(lam)]_jk = -exp(-sqrt(lam) |y_j - y_k|) / (4 pi |y_j - y_k|)

Bound states sit exactly at det Gamma(lam) = 0, and the zero-energy
scattering length is -(1/4pi) * sum of all entries of Gamma(0)^{-1}.

Non-local symmetric two-center family at internal parameter theta,
t = tan(theta/2), separation r, complex spectral parameter z:

    A(z) = (i + t)/(4 sqrt(2) pi) + (sqrt(-z) - sqrt(i))/(4 pi)
    B(z) = (i + t) exp(-r/sqrt2) sin(r/sqrt2)/(4 pi r)
           - (exp(-sqrt(-z) r) - exp(-sqrt(i) r))/(4 pi r)

arranged as [[A, B], [B, A]]. sqrt(i) = e^{i pi/4}; the branch of
sqrt(-z) has nonnegative real part, approached from Im z > 0, so on the
positive real axis sqrt(-z) = -i sqrt(z) (outgoing waves).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMatrixError
from .special import expm1_complex

__all__ = [
    "SQRT_I",
    "CenterConfig",
    "sqrt_minus",
    "green_function",
    "gamma_local",
    "gamma_nonlocal",
    "resolvent_coefficient_sum",
]

FOUR_PI = 4.0 * math.pi
_SQRT2 = math.sqrt(2.0)

#: principal square root of i
SQRT_I = complex(math.sqrt(0.5), math.sqrt(0.5))


def sqrt_minus(z: complex) -> complex:
    """sqrt(-z) on the branch with Re >= 0, from above the positive axis.

    For z on the positive real axis this is -i*sqrt(z): the physical
    (outgoing) limit, which the principal square root of -z+0j would miss.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real > 0.0:
        return complex(0.0, -math.sqrt(z.real))
    w = cmath.sqrt(-z)
    if w.real < 0.0:  # principal branch already has Re >= 0; keep it explicit
        w = -w
    return w


def green_function(lam: float, dist: float) -> float:
    """Free Green's function exp(-sqrt(lam) d)/(4 pi d) at lam = -E >= 0."""
    if lam < 0.0 or dist <= 0.0:
        raise DomainError("green_function: need lam >= 0 and dist > 0")
    return math.exp(-math.sqrt(lam) * dist) / (FOUR_PI * dist)


@dataclass
class CenterConfig:
    """Positions (n,3) and boundary parameters (n,) of a local family."""

    positions: np.ndarray
    alphas: np.ndarray

    def __post_init__(self) -> None:
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.alphas = np.atleast_1d(np.asarray(self.alphas, dtype=float))
        n = self.alphas.shape[0]
        if self.positions.shape != (n, 3):
            raise DomainError(
                f"CenterConfig: positions shape {self.positions.shape} does not "
                f"match {n} boundary parameters (need ({n}, 3))"
            )
        if n == 0:
            raise DomainError("CenterConfig: at least one center required")
        if n > 1:
            d = self.distances()
            off = d[~np.eye(n, dtype=bool)]
            if np.any(off <= 0.0):
                raise DomainError("CenterConfig: coincident centers")

    @property
    def n(self) -> int:
        return self.alphas.shape[0]

    def distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    @classmethod
    def single(cls, alpha: float) -> "CenterConfig":
        return cls(np.zeros((1, 3)), np.array([float(alpha)]))

    @classmethod
    def symmetric_pair(cls, alpha: float, r: float) -> "CenterConfig":
        """Two centers at +-(r/2) on the z axis with a common parameter."""
        if r <= 0.0:
            raise DomainError("symmetric_pair: separation must be positive")
        pos = np.array([[0.0, 0.0, 0.5 * r], [0.0, 0.0, -0.5 * r]])
        return cls(pos, np.array([float(alpha), float(alpha)]))


def _gamma_local_stack(config: CenterConfig, lams: np.ndarray) -> np.ndarray:
    """Gamma(lam) for a whole grid of lam values, shape (m, n, n)."""
    lams = np.asarray(lams, dtype=float)
    if np.any(lams < 0.0):
        raise DomainError("gamma_local: spectral parameter lam must be >= 0")
    n = config.n
    d = config.distances()
    s = np.sqrt(lams)[:, None, None]
    out = np.zeros((lams.shape[0], n, n))
    if n > 1:
        mask = ~np.eye(n, dtype=bool)
        dm = np.where(mask, d, 1.0)
        out = np.where(mask, -np.exp(-s * dm) / (FOUR_PI * dm), 0.0)
    idx = np.arange(n)
    out[:, idx, idx] = config.alphas[None, :] + np.sqrt(lams)[:, None] / FOUR_PI
    return out


def gamma_local(config: CenterConfig, lam: float) -> np.ndarray:
    """The n x n local coupling matrix at lam = -E >= 0 (real symmetric)."""
    return _gamma_local_stack(config, np.array([float(lam)]))[0]


def gamma_nonlocal(t_theta: float, r: float, z: complex) -> np.ndarray:
    """The 2 x 2 non-local coupling matrix [[A, B], [B, A]] at parameter z.

    The off-diagonal exponential difference is assembled through a complex
    expm1 so that r -> 0 keeps full precision (the leading 1's cancel
    exactly instead of numerically).
    """
    t_theta = float(t_theta)
    r = float(r)
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError(f"gamma_nonlocal: separation r={r!r} must be positive")
    if not math.isfinite(t_theta):
        raise DomainError("gamma_nonlocal: t_theta must be finite")
    w = sqrt_minus(z)
    it = complex(0.0, 1.0) + t_theta
    x = r / _SQRT2
    s_diag = 1.0 / (4.0 * _SQRT2 * math.pi)
    s_off = math.exp(-x) * math.sin(x) / (FOUR_PI * r)
    c_diag = (w - SQRT_I) / FOUR_PI
    c_off = -(expm1_complex(-w * r) - expm1_complex(-SQRT_I * r)) / (FOUR_PI * r)
    a = it * s_diag + c_diag
    b = it * s_off + c_off
    return np.array([[a, b], [b, a]], dtype=complex)


def resolvent_coefficient_sum(mat: np.ndarray) -> complex:
    """Sum of all entries of mat^{-1} (the weight 1^T mat^{-1} 1).

    This is the combination of coupling coefficients that enters the
    scattering length and the low-energy resolvent. Raises
    SingularMatrixError when the matrix is singular at working precision
    (determinant below 1e-12 of the natural entry scale)."""
    mat = np.asarray(mat)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise DomainError(f"resolvent_coefficient_sum: non-square shape {mat.shape}")
    scale = float(np.max(np.abs(mat)))
    if scale == 0.0:
        raise SingularMatrixError("resolvent_coefficient_sum: zero matrix")
    det = complex(np.linalg.det(mat))
    if abs(det) < 1e-12 * scale**n:
        raise SingularMatrixError(
            f"resolvent_coefficient_sum: matrix is singular (|det| = {abs(det):.3e})"
        )
    ones = np.ones(n, dtype=mat.dtype)
    sol = np.linalg.solve(mat, ones)
    return complex(np.sum(sol))
