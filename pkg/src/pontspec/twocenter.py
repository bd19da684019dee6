"""Bound branches, scattering and eigenfunctions of the non-local pair.

The two bound branches of the symmetric non-local two-center family are
roots of the determinant factors of the 2x2 coupling matrix, and both
reduce to Lambert-W closed forms in s = sqrt(lam) r:

    even:  s + g0 = exp(-s)   with  g0 = (t-1) r/sqrt2 + e^{-x}(t sin x + cos x)
    odd:   s + g1 = -exp(-s)  with  g1 = (t-1) r/sqrt2 - e^{-x}(t sin x + cos x)

where x = r/sqrt2 and t = tan(theta/2). The even root exists iff g0 <= 1
(s = W0(e^{g0}) - g0), the odd one iff g1 <= -1 (s = W0(-e^{g1}) - g1);
energies are eps = -(s/r)^2. The boundary parameter alpha(r, t) = g0/(4 pi r)
maps the even sector onto a local symmetric pair with that alpha, exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMatrixError
from .gamma import FOUR_PI, gamma_nonlocal
from .special import lambert_w0, lambert_w0_array

__all__ = [
    "EffectiveEigenvalue",
    "ScatteringRecord",
    "g_functions",
    "epsilon0",
    "epsilon1",
    "epsilon0_curve",
    "epsilon1_curve",
    "alpha_boundary",
    "scattering_length_theta",
    "generalized_eigenfunction",
    "scattering_amplitude",
]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class EffectiveEigenvalue:
    """One bound branch of the pair at fixed separation.

    value is the energy (None when the branch is absent), g the branch's
    transcendental offset, lambert_arg the argument handed to W0 and
    decay_rate = sqrt(-value) the exponential falloff of the bound state.
    A threshold root (g exactly at its critical value) reports exists=True
    with value 0.0."""

    value: float | None
    exists: bool
    branch: str
    g: float
    lambert_arg: float | None
    decay_rate: float | None


@dataclass(frozen=True)
class ScatteringRecord:
    """Zero-energy scattering length of the pair.

    diverged marks a zero-energy resonance (the denominator 1 - g0
    vanishes); small_r_limit is the merged-center value sqrt2/(1 - t)."""

    value: float
    diverged: bool
    small_r_limit: float


def g_functions(r: float, t_theta: float) -> tuple[float, float]:
    """The pair (g0, g1) of transcendental offsets at separation r."""
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError(f"g_functions: separation r={r!r} must be positive")
    x = r / _SQRT2
    base = (t_theta - 1.0) * x
    osc = math.exp(-x) * (t_theta * math.sin(x) + math.cos(x))
    return base + osc, base - osc


def epsilon0(t_theta: float, r: float) -> EffectiveEigenvalue:
    """The even (deeper) bound branch; exists iff g0 <= 1."""
    g0, _ = g_functions(r, t_theta)
    if g0 > 1.0:
        return EffectiveEigenvalue(None, False, "even", g0, None, None)
    arg = math.exp(g0)
    s = lambert_w0(arg).value - g0
    rate = s / r
    return EffectiveEigenvalue(-rate * rate, True, "even", g0, arg, rate)


def epsilon1(t_theta: float, r: float) -> EffectiveEigenvalue:
    """The odd (shallower) bound branch; exists iff g1 <= -1.

    Near the threshold the value is computed through two cancelling steps
    (g1 + 1 and the Lambert branch point), so its relative accuracy
    degrades as g1 -> -1; the existence flag itself is exact."""
    _, g1 = g_functions(r, t_theta)
    if g1 > -1.0:
        return EffectiveEigenvalue(None, False, "odd", g1, None, None)
    arg = -math.exp(g1)
    s = lambert_w0(arg).value - g1
    rate = s / r
    return EffectiveEigenvalue(-rate * rate, True, "odd", g1, arg, rate)


def _g_arrays(r: np.ndarray, t_theta: float) -> tuple[np.ndarray, np.ndarray]:
    x = r / _SQRT2
    base = (t_theta - 1.0) * x
    osc = np.exp(-x) * (t_theta * np.sin(x) + np.cos(x))
    return base + osc, base - osc


def epsilon0_curve(t_theta: float, r_values: np.ndarray) -> np.ndarray:
    """Even-branch energy on a separation grid; NaN where absent.

    r = 0 entries are filled with the merged-center limit -(1-t)^2/2
    (0 for t = 1, NaN for t > 1 where the branch is absent near contact).
    """
    r = np.asarray(r_values, dtype=float)
    if np.any(r < 0.0) or np.any(~np.isfinite(r)):
        raise DomainError("epsilon0_curve: separations must be finite and >= 0")
    out = np.full(r.shape, np.nan)
    zero = r == 0.0
    if np.any(zero):
        out[zero] = -0.5 * (1.0 - t_theta) ** 2 if t_theta <= 1.0 else np.nan
    pos = ~zero
    if np.any(pos):
        rp = r[pos]
        g0, _ = _g_arrays(rp, t_theta)
        ok = g0 <= 1.0
        w = lambert_w0_array(np.exp(np.where(ok, g0, 0.0)))
        s = w - g0
        vals = np.where(ok, -((s / rp) ** 2), np.nan)
        out[pos] = vals
    return out


def epsilon1_curve(t_theta: float, r_values: np.ndarray) -> np.ndarray:
    """Odd-branch energy on a separation grid; NaN where absent (and at r=0)."""
    r = np.asarray(r_values, dtype=float)
    if np.any(r < 0.0) or np.any(~np.isfinite(r)):
        raise DomainError("epsilon1_curve: separations must be finite and >= 0")
    out = np.full(r.shape, np.nan)
    pos = r > 0.0
    if np.any(pos):
        rp = r[pos]
        _, g1 = _g_arrays(rp, t_theta)
        ok = g1 <= -1.0
        w = lambert_w0_array(-np.exp(np.where(ok, g1, -2.0)))
        s = w - g1
        out[pos] = np.where(ok, -((s / rp) ** 2), np.nan)
    return out


def alpha_boundary(r: float, t_theta: float) -> float:
    """Local boundary parameter g0/(4 pi r) equivalent to the even sector.

    A local symmetric pair with this alpha has the same even determinant
    factor as the non-local pair, root for root."""
    g0, _ = g_functions(r, t_theta)
    return g0 / (FOUR_PI * r)


def scattering_length_theta(t_theta: float, r: float) -> ScatteringRecord:
    """Scattering length 2r/(1 - g0), assembled without cancellation.

    1 - g0 = (1-t)x + (1 - e^{-x} cos x) - t e^{-x} sin x is computed with
    expm1 and half-angle pieces so small separations keep full precision.
    A vanishing denominator is a zero-energy resonance."""
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError(f"scattering_length_theta: bad separation {r!r}")
    x = r / _SQRT2
    ex_sin = math.exp(-x) * math.sin(x)
    # 1 - e^{-x} cos x, stable at small x
    head = 2.0 * math.sin(0.5 * x) ** 2 - math.cos(x) * math.expm1(-x)
    denom = (1.0 - t_theta) * x + head - t_theta * ex_sin
    limit = math.inf if t_theta == 1.0 else _SQRT2 / (1.0 - t_theta)
    scale = abs((1.0 - t_theta) * x) + abs(head) + abs(t_theta * ex_sin)
    if denom == 0.0 or abs(denom) < 1e-15 * scale:
        return ScatteringRecord(value=math.inf, diverged=True, small_r_limit=limit)
    return ScatteringRecord(value=2.0 * r / denom, diverged=False, small_r_limit=limit)


def _centers(r: float) -> np.ndarray:
    return np.array([[0.0, 0.0, 0.5 * r], [0.0, 0.0, -0.5 * r]])


def _inverse_2x2(m: np.ndarray) -> np.ndarray:
    a, b = m[0, 0], m[0, 1]
    det = a * a - b * b
    scale = max(abs(a), abs(b))
    if scale == 0.0 or abs(det) < 1e-12 * scale * scale:
        raise SingularMatrixError("two-center coupling matrix is singular")
    return np.array([[a, -b], [-b, a]]) / det


def generalized_eigenfunction(
    t_theta: float, r: float, k_vec: np.ndarray, x: np.ndarray
) -> complex:
    """Scattering eigenfunction at momentum k_vec, evaluated at x.

    Plane wave plus one outgoing spherical wave per center, with weights
    from the inverse coupling matrix at z = |k|^2 (outgoing branch). The
    centers sit at +-(r/2) on the z axis; x on a center is rejected since
    the eigenfunction has its 1/|x - y| singularity there."""
    k_vec = np.asarray(k_vec, dtype=float).reshape(3)
    x = np.asarray(x, dtype=float).reshape(3)
    kk = float(k_vec @ k_vec)
    kmag = math.sqrt(kk)
    inv = _inverse_2x2(gamma_nonlocal(t_theta, r, kk))
    ys = _centers(r)
    psi = complex(np.exp(1j * float(k_vec @ x)))
    for m in range(2):
        d = float(np.linalg.norm(x - ys[m]))
        if d == 0.0:
            raise DomainError("generalized_eigenfunction: x coincides with a center")
        outgoing = np.exp(1j * kmag * d) / (FOUR_PI * d)
        for n in range(2):
            psi += inv[m, n] * np.exp(1j * float(k_vec @ ys[n])) * outgoing
    return complex(psi)


def scattering_amplitude(
    t_theta: float, r: float, k_mag: float, omega_in: np.ndarray, omega_out: np.ndarray
) -> complex:
    """Far-field amplitude for incidence omega_in and observation omega_out.

    f(k; in -> out) = (1/4pi) sum_mn [Gamma(k^2)^{-1}]_mn
                      exp(i k omega_in . y_n) exp(-i k omega_out . y_m),
    which tends to minus the scattering length as k -> 0."""
    if k_mag < 0.0:
        raise DomainError("scattering_amplitude: k must be >= 0")
    w_in = np.asarray(omega_in, dtype=float).reshape(3)
    w_out = np.asarray(omega_out, dtype=float).reshape(3)
    ni, no = np.linalg.norm(w_in), np.linalg.norm(w_out)
    if ni == 0.0 or no == 0.0:
        raise DomainError("scattering_amplitude: directions must be nonzero")
    w_in = w_in / ni
    w_out = w_out / no
    inv = _inverse_2x2(gamma_nonlocal(t_theta, r, k_mag * k_mag))
    ys = _centers(r)
    total = 0.0 + 0.0j
    for m in range(2):
        for n in range(2):
            phase = k_mag * (float(w_in @ ys[n]) - float(w_out @ ys[m]))
            total += inv[m, n] * np.exp(1j * phase)
    return complex(total / FOUR_PI)
