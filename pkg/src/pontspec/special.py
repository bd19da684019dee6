"""Scalar special functions for zero-range spectral problems.

Three ingredients live here:

* the principal branch W0 of the Lambert W function, which carries every
  bound-state root of the transcendental family  s + c = exp(-s);
* the modified Bessel function of imaginary order,

      K_{i*beta}(tau) = int_0^inf exp(-tau*cosh t) * cos(beta*t) dt,

  together with its derivative in tau, which is the decaying radial
  solution in an attractive inverse-square tail -k/r^2 with k > 1/4;
* the constants attached to such a tail: beta = sqrt(k - 1/4), the
  small-argument amplitude C_beta = -sqrt(pi / (beta*sinh(beta*pi))) and
  the phase phi_beta = arg Gamma(1 + i*beta), which control

      K_{i*beta}(tau) ~ C_beta * sin(beta*log(tau/2) - phi_beta),  tau -> 0.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as _sps

from .errors import ConvergenceError, DomainError

__all__ = [
    "OMEGA",
    "LambertEval",
    "BesselImOrder",
    "BetaConstants",
    "lambert_w0",
    "lambert_w0_array",
    "expm1_complex",
    "bessel_k_imag_order",
    "beta_constants",
]

_INV_E = math.exp(-1.0)

# exp(-tau*(cosh t - 1)) drops below 1e-19 relative to the integrand head
# beyond this excess, so the half-line quadrature can stop there.
_TAIL_EXCESS = 45.0

# Below this argument the quadrature window grows like log(1/tau) while the
# two-term small-argument form is already accurate to ~(tau/2)^2.
_SMALL_TAU = 1e-3

_HALLEY_CAP = 50


@dataclass(frozen=True)
class LambertEval:
    """One W0 evaluation with its convergence certificate.

    residual is |w*exp(w) - x| relative to max(|x|, tiny), so it is a
    scale-free measure of how well the defining equation is satisfied.
    """

    value: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class BesselImOrder:
    """K_{i*beta}(tau) and d/dtau K_{i*beta}(tau) at a single point."""

    value: float
    derivative: float
    beta: float
    tau: float
    method: str  # "quadrature" or "small-argument"


@dataclass(frozen=True)
class BetaConstants:
    """Constants of an inverse-square tail -k/r^2 with k > 1/4."""

    k: float
    beta: float
    c_beta: float
    phi_beta: float


def _w0_seed(x: float) -> float:
    # Branch-point series in p = sqrt(2*(1 + e*x)) near x = -1/e, plain
    # power series near 0, log asymptotics for large arguments.
    if x < -0.2:
        p = math.sqrt(max(0.0, 2.0 * (1.0 + math.e * x)))
        return -1.0 + p * (1.0 - p * (1.0 / 3.0 - p * (11.0 / 72.0 - p * (43.0 / 540.0))))
    if abs(x) <= 0.5:
        return x * (1.0 - x * (1.0 - 1.5 * x))
    if x <= 10.0:
        return math.log1p(x)
    lg = math.log(x)
    return lg - math.log(lg)


def lambert_w0(x: float) -> LambertEval:
    """Principal Lambert W: the root w >= -1 of w*exp(w) = x.

    Defined for x >= -1/e. Halley iteration from a piecewise seed. Two
    stopping rules: a step-size one, and a residual one relative to the
    equation's own scale; the latter matters near the branch point, where
    the root is double and step sizes stall at the conditioning floor long
    after the equation is satisfied to machine precision. The returned
    residual certifies |w*exp(w) - x| <= 1e-14 relative.

    Raises DomainError below -1/e and ConvergenceError if the iteration
    cap is hit, neither of which occurs for valid finite input.
    """
    x = float(x)
    if math.isnan(x):
        raise DomainError("lambert_w0: argument is NaN")
    if x < -_INV_E:
        # allow rounding noise at the branch point itself
        if 1.0 + x * math.e < -1e-12:
            raise DomainError(f"lambert_w0: argument {x!r} below -1/e")
        x = -_INV_E
    w = _w0_seed(x)
    for it in range(1, _HALLEY_CAP + 1):
        ew = math.exp(w)
        f = w * ew - x
        scale = abs(x) + abs(w * ew) + 1e-300
        if abs(f) <= 1e-15 * scale:
            return LambertEval(value=w, iterations=it, residual=abs(f) / max(abs(x), 1e-300))
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - 0.5 * f * (w + 2.0) / wp1)
        w -= dw
        if abs(dw) <= 1e-16 * (2.0 + abs(w)):
            resid = abs(w * math.exp(w) - x) / max(abs(x), 1e-300)
            return LambertEval(value=w, iterations=it, residual=resid)
    raise ConvergenceError(f"lambert_w0: no convergence at x={x!r}")


def lambert_w0_array(x: np.ndarray) -> np.ndarray:
    """Vectorized W0 for curve evaluation. Same math as lambert_w0."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    if np.any(np.isnan(x)) or np.any(1.0 + x * math.e < -1e-12):
        raise DomainError("lambert_w0_array: argument below -1/e or NaN")
    xc = np.maximum(x, -_INV_E)

    p = np.sqrt(np.maximum(0.0, 2.0 * (1.0 + math.e * xc)))
    seed_branch = -1.0 + p * (1.0 - p * (1.0 / 3.0 - p * (11.0 / 72.0 - p * (43.0 / 540.0))))
    seed_series = xc * (1.0 - xc * (1.0 - 1.5 * xc))
    xs = np.maximum(xc, 1e-300)
    lg = np.log(np.maximum(xs, 1.001))
    seed_log = np.where(xc <= 10.0, np.log1p(xs), lg - np.log(lg))
    w = np.where(xc < -0.2, seed_branch, np.where(np.abs(xc) <= 0.5, seed_series, seed_log))

    for _ in range(_HALLEY_CAP):
        ew = np.exp(w)
        f = w * ew - xc
        # entries already satisfying the equation at machine scale are
        # frozen: near the branch point steps stall at the conditioning
        # floor even though the residual is long converged
        done = np.abs(f) <= 1e-15 * (np.abs(xc) + np.abs(w * ew) + 1e-300)
        wp1 = w + 1.0
        safe = (np.abs(wp1) > 1e-300) & ~done
        denom = np.where(safe, ew * wp1 - 0.5 * f * (w + 2.0) / np.where(safe, wp1, 1.0), 1.0)
        dw = np.where(safe, f / denom, 0.0)
        w = w - dw
        if np.all(np.abs(dw) <= 1e-16 * (2.0 + np.abs(w))):
            return w
    raise ConvergenceError("lambert_w0_array: no convergence")


#: The Omega constant W0(1); lambda*r^2 -> OMEGA**2 governs two-center collapse.
OMEGA = lambert_w0(1.0).value


def expm1_complex(z: complex) -> complex:
    """exp(z) - 1 without cancellation for small complex z."""
    z = complex(z)
    if abs(z) >= 0.5:
        return cmath.exp(z) - 1.0
    # Horner form of the Taylor series; degree 16 leaves < 1 ulp at |z| = 0.5
    acc = 1.0 + 0.0j
    for n in range(16, 1, -1):
        acc = 1.0 + acc * z / n
    return z * acc


def _k_quadrature(beta: float, tau: float) -> tuple[float, float]:
    # integrand is exp(-tau*cosh t)*cos(beta*t); truncation at t_max keeps
    # the discarded tail below e^{-45} of the head for every tau
    t_max = math.acosh(1.0 + _TAIL_EXCESS / tau)

    def f(t: float) -> float:
        return math.exp(-tau * math.cosh(t)) * math.cos(beta * t)

    def fd(t: float) -> float:
        return -math.cosh(t) * math.exp(-tau * math.cosh(t)) * math.cos(beta * t)

    # for tau just above the series handover the integrand oscillates enough
    # that quad reports slow convergence; the returned values are still good
    # to ~1e-12 (checked against arbitrary-precision evaluation), so silence
    # only that advisory
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, 0.0, t_max, epsabs=0.0, epsrel=1e-12, limit=400)
        der, _ = integrate.quad(fd, 0.0, t_max, epsabs=0.0, epsrel=1e-12, limit=400)
    return val, der


def _phi_beta(beta: float) -> float:
    # arg Gamma(1 + i*beta) through the complex log-Gamma
    return float(_sps.loggamma(complex(1.0, beta)).imag)


def _c_beta(beta: float) -> float:
    return -math.sqrt(math.pi / (beta * math.sinh(beta * math.pi)))


def _k_small_argument(beta: float, tau: float) -> tuple[float, float]:
    c = _c_beta(beta)
    theta = beta * math.log(0.5 * tau) - _phi_beta(beta)
    return c * math.sin(theta), c * (beta / tau) * math.cos(theta)


def bessel_k_imag_order(beta: float, tau: float) -> BesselImOrder:
    """K_{i*beta}(tau) and its tau-derivative for beta >= 0, tau > 0.

    Evaluated by adaptive quadrature of the cosine integral representation,
    truncated where the integrand has decayed by e^-45 relative to t = 0.
    Below tau = 1e-3 (and for beta > 0) the small-argument oscillatory form
    C_beta*sin(beta*log(tau/2) - phi_beta) takes over; its error is
    O((tau/2)^2), matching the quadrature to ~1e-7 at the handover and far
    better below. beta = 0 always goes through quadrature because its
    small-argument behaviour is logarithmic, not oscillatory.
    """
    beta = float(beta)
    tau = float(tau)
    if not (beta >= 0.0) or not math.isfinite(beta):
        raise DomainError(f"bessel_k_imag_order: need beta >= 0, got {beta!r}")
    if not (tau > 0.0) or not math.isfinite(tau):
        raise DomainError(f"bessel_k_imag_order: need tau > 0, got {tau!r}")
    if tau < _SMALL_TAU and beta > 0.0:
        val, der = _k_small_argument(beta, tau)
        return BesselImOrder(val, der, beta, tau, "small-argument")
    val, der = _k_quadrature(beta, tau)
    return BesselImOrder(val, der, beta, tau, "quadrature")


def beta_constants(k: float) -> BetaConstants:
    """Tail constants beta, C_beta, phi_beta for strength k > 1/4.

    At or below k = 1/4 the inverse-square tail stops producing an infinite
    bound-state sequence and these constants lose meaning, so that input is
    rejected outright.
    """
    k = float(k)
    if not (k > 0.25):
        raise DomainError(
            f"beta_constants: inverse-square strength k={k!r} is at or below "
            "the critical value 1/4; no oscillatory regime exists"
        )
    beta = math.sqrt(k - 0.25)
    return BetaConstants(k=k, beta=beta, c_beta=_c_beta(beta), phi_beta=_phi_beta(beta))
