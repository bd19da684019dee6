"""Geometric level accumulation for potentials with a -k/r^2 tail.

Any potential that is exactly -k/r^2 beyond a core radius r0, with
k > 1/4, binds infinitely many states whose energies pile up at zero in
geometric progression: E_n / E_{n+1} -> exp(2 pi / beta) with
beta = sqrt(k - 1/4). For the reference family with an empty core the
eigenvalue condition closes in terms of K_{i beta}: writing tau = lam r0,
bound states satisfy

    K_{i beta}(tau) = f(tau) K'_{i beta}(tau),
    f(tau) = 2 tau tanh(tau) / (2 tau - tanh(tau)),

and for small tau the left side oscillates in log tau, so roots are
found in the phase variable theta = beta log(tau / 2) - phi_beta where
consecutive roots sit ~pi apart. The closed-form anchor points

    tau_n0 = 2 exp((arctan(2 beta) + phi_beta - n pi) / beta)

approximate the true roots with an error that itself decays like tau^2,
which is what the asymptotic_reference field records.

Arbitrary cores are handled numerically by delegating to the shooting
module, which matches the integrated core solution against the exact
sqrt(r) K_{i beta}(lam r) tail. The module also carries the certified
a-priori bounds used to control such solutions: an edge bound derived
from the energy functional on the matching window (lemma_bounds_check)
and the small-radius linear bound u(r) <= A lam r for u'(0) = A lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PontspecError, PreconditionError
from .special import OMEGA, bessel_k_imag_order, beta_constants
from .shooting import RadialPotential, find_levels, shoot
from .twocenter import epsilon0_curve

__all__ = [
    "PiecewisePotential",
    "EfimovSpectrum",
    "AuxiliaryPotential",
    "LemmaBoundsRecord",
    "analytic_levels",
    "asymptotic_levels",
    "numeric_levels",
    "lemma_bounds_check",
]

# smallest tau the root scan will descend to; keeps E = -(tau/r0)^2
# representable and stays clear of subnormal K' overflow (K' ~ beta/tau)
_TAU_FLOOR_ABS = 1e-280
_TAU_FLOOR_REL = 1e-150

_THETA_STEP = math.pi / 8.0
_BRENTQ_KW = dict(rtol=8.9e-16, xtol=1e-14, maxiter=200)


@dataclass(frozen=True)
class PiecewisePotential:
    """Core profile on (0, r0] glued to an exact -k/r^2 tail.

    inner must be vectorized, finite and non-positive on (0, r0]; the
    tail exponent k must exceed 1/4 so the accumulation regime applies."""

    inner: Callable[[np.ndarray], np.ndarray]
    r0: float
    k: float

    def __post_init__(self):
        if not (self.r0 > 0.0) or not math.isfinite(self.r0):
            raise DomainError(f"PiecewisePotential: bad core radius {self.r0!r}")
        if not (self.k > 0.25):
            raise DomainError(
                f"PiecewisePotential: tail needs k > 1/4, got {self.k!r}"
            )
        probe = np.linspace(self.r0 / 64.0, self.r0, 64)
        vals = np.asarray(self.inner(probe), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise DomainError("PiecewisePotential: inner not finite on (0, r0]")
        if np.any(vals > 1e-12):
            raise DomainError("PiecewisePotential: inner must be non-positive")

    def as_radial(self) -> RadialPotential:
        return RadialPotential(
            v=self.inner, r_core=self.r0, tail="inverse_square", k=self.k
        )

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        return self.as_radial().evaluate(r)


@dataclass(frozen=True)
class EfimovSpectrum:
    """Deepest slice of an accumulating spectrum, deepest level first.

    levels are the energies E_n < 0 in increasing order (toward zero),
    taus the matching variables lam_n r0, ratios the successive quotients
    E_n / E_{n+1}, and asymptotic_reference the zero-phase closed-form
    energies -(tau_n0 / r0)^2 paired to each level by tail phase. nodes
    carries half-line node counts when the levels came from the ODE
    route, None for the analytic route where count equals index."""

    levels: tuple[float, ...]
    taus: tuple[float, ...]
    ratios: tuple[float, ...]
    asymptotic_reference: tuple[float, ...]
    requested: int
    delivered: int
    nodes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.delivered != len(self.levels):
            raise DomainError("EfimovSpectrum: delivered must count levels")
        if len(self.taus) != self.delivered:
            raise DomainError("EfimovSpectrum: taus length mismatch")
        if len(self.asymptotic_reference) != self.delivered:
            raise DomainError("EfimovSpectrum: reference length mismatch")
        if len(self.ratios) != max(0, self.delivered - 1):
            raise DomainError("EfimovSpectrum: ratios length mismatch")
        if self.nodes is not None and len(self.nodes) != self.delivered:
            raise DomainError("EfimovSpectrum: nodes length mismatch")
        if any(e >= 0.0 for e in self.levels):
            raise DomainError("EfimovSpectrum: levels must be negative")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise DomainError("EfimovSpectrum: levels must increase toward 0")


def _f(tau: float) -> float:
    """Matching slope 2 tau tanh(tau) / (2 tau - tanh(tau)).

    Below 1e-4 the leading term 2 tau is exact to double precision and
    avoids the tau^2 underflow of the product form near the tau floor."""
    if tau < 1e-4:
        return 2.0 * tau
    th = math.tanh(tau)
    return 2.0 * tau * th / (2.0 * tau - th)


def _residual(beta: float, tau: float) -> float:
    kb = bessel_k_imag_order(beta, tau)
    return kb.value - _f(tau) * kb.derivative


def _tau_floor(r0: float) -> float:
    return max(_TAU_FLOOR_ABS, _TAU_FLOOR_REL * r0)


def _reference_index(beta: float, phi_beta: float, tau: float) -> int:
    """Anchor index n whose tau_n0 is nearest in tail phase to tau."""
    theta = beta * math.log(tau / 2.0) - phi_beta
    return int(round((math.atan(2.0 * beta) - theta) / math.pi))


def _anchor_tau(beta: float, phi_beta: float, n: int) -> float:
    return 2.0 * math.exp((math.atan(2.0 * beta) + phi_beta - n * math.pi) / beta)


def _build_spectrum(
    taus: list[float],
    r0: float,
    beta: float,
    phi_beta: float,
    requested: int,
    nodes: tuple[int, ...] | None,
) -> EfimovSpectrum:
    levels = tuple(-((t / r0) ** 2) for t in taus)
    ratios = tuple(
        levels[i] / levels[i + 1] for i in range(len(levels) - 1)
    )
    ref = tuple(
        -((_anchor_tau(beta, phi_beta, _reference_index(beta, phi_beta, t)) / r0) ** 2)
        for t in taus
    )
    return EfimovSpectrum(
        levels=levels,
        taus=tuple(taus),
        ratios=ratios,
        asymptotic_reference=ref,
        requested=requested,
        delivered=len(taus),
        nodes=nodes,
    )


def analytic_levels(k: float, r0: float, n_max: int) -> EfimovSpectrum:
    """Deepest n_max levels of the empty-core family, deepest first.

    Roots of K_{i beta}(tau) = f(tau) K'_{i beta}(tau) are isolated in
    the phase variable theta = beta log(tau / 2) - phi_beta, where they
    sit ~pi apart, and polished by brentq. The scan starts at
    tau = sqrt(k) (no roots above, since K > 0 there while K' < 0) and
    stops at a tau floor that keeps -(tau/r0)^2 representable; when the
    floor truncates the list, delivered < requested reports it."""
    if n_max < 1:
        raise DomainError(f"analytic_levels: need n_max >= 1, got {n_max!r}")
    if not (r0 > 0.0) or not math.isfinite(r0):
        raise DomainError(f"analytic_levels: bad core radius {r0!r}")
    bc = beta_constants(k)
    beta, phib = bc.beta, bc.phi_beta

    def g(theta: float) -> float:
        return _residual(beta, 2.0 * math.exp((theta + phib) / beta))

    theta_lo_stop = beta * math.log(_tau_floor(r0) / 2.0) - phib
    theta = beta * math.log(math.sqrt(k) / 2.0) - phib
    g_hi = g(theta)
    taus: list[float] = []
    while len(taus) < n_max and theta > theta_lo_stop:
        theta_next = max(theta - _THETA_STEP, theta_lo_stop)
        g_lo = g(theta_next)
        if g_hi == 0.0:
            taus.append(2.0 * math.exp((theta + phib) / beta))
        elif g_lo * g_hi < 0.0:
            th_root = brentq(g, theta_next, theta, **_BRENTQ_KW)
            taus.append(2.0 * math.exp((th_root + phib) / beta))
        theta, g_hi = theta_next, g_lo
    return _build_spectrum(taus, r0, beta, phib, n_max, None)


def asymptotic_levels(k: float, r0: float, n_values: Iterable[int]) -> tuple[float, ...]:
    """Closed-form anchor energies -(tau_n0 / r0)^2 for the given n.

    Pure arithmetic on the anchor formula; deep in the accumulation
    (large n) the value underflows silently to -0.0."""
    if not (r0 > 0.0) or not math.isfinite(r0):
        raise DomainError(f"asymptotic_levels: bad core radius {r0!r}")
    bc = beta_constants(k)
    out = []
    for n in n_values:
        t = _anchor_tau(bc.beta, bc.phi_beta, int(n))
        out.append(-((t / r0) ** 2))
    return tuple(out)


def _tail_zero_count(beta: float, tau_lo: float, tau_hi: float) -> int:
    """Zeros of K_{i beta} on (tau_lo, tau_hi), by sign scan in phase.

    Successive zeros are ~pi apart in theta = beta log(tau / 2), so a
    pi/20 grid cannot straddle two of them."""
    if not tau_lo < tau_hi:
        return 0
    th_lo = beta * math.log(tau_lo / 2.0)
    th_hi = beta * math.log(tau_hi / 2.0)
    n_seg = max(8, int(math.ceil((th_hi - th_lo) / (math.pi / 20.0))))
    thetas = np.linspace(th_lo, th_hi, n_seg + 1)
    vals = np.array(
        [bessel_k_imag_order(beta, 2.0 * math.exp(t / beta)).value for t in thetas]
    )
    return int(np.count_nonzero(vals[:-1] * vals[1:] < 0.0))


def numeric_levels(
    potential: PiecewisePotential, n_max: int, *, target_rel: float = 1e-8
) -> EfimovSpectrum:
    """Deepest n_max levels of an arbitrary core, via the ODE route.

    Delegates the eigenvalue search to the shooting module (exact
    K_{i beta} tail condition) and labels each level with its half-line
    node count: sign changes of the integrated core solution plus the
    zeros the tail K_{i beta}(lam r) still has beyond r0. The
    asymptotic_reference is the empty-core anchor family; it is only
    meaningful for tail-dominated levels (tau well below sqrt(k))."""
    if not isinstance(potential, PiecewisePotential):
        raise DomainError("numeric_levels: expected a PiecewisePotential")
    bc = beta_constants(potential.k)
    rad = potential.as_radial()
    res = find_levels(rad, n_max, target_rel=target_rel)
    sqrt_k = math.sqrt(potential.k)
    taus: list[float] = []
    nodes: list[int] = []
    for lam in res.lambdas:
        rec = shoot(rad, lam, points=res.points)
        tau = lam * potential.r0
        taus.append(tau)
        nodes.append(rec.nodes + _tail_zero_count(bc.beta, tau, sqrt_k))
    return _build_spectrum(
        taus, potential.r0, bc.beta, bc.phi_beta, n_max, tuple(nodes)
    )


@dataclass(frozen=True)
class AuxiliaryPotential:
    """Pair eigenvalue curve glued to its own limiting -W(1)^2/r^2 tail.

    The symmetric-pair curve eps0(r) at unit coupling phase crosses its
    small-distance envelope -W(1)^2/r^2 at r_m = sqrt(2)(3 pi/4 + m pi);
    cutting there and continuing with the envelope gives a comparison
    potential whose distance to the true curve beyond the cut is
    uniformly below exp(-m pi)/m^2. Useful as a certified stand-in whose
    spectrum brackets the accumulation of the full curve."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 0:
            raise DomainError(f"AuxiliaryPotential: need integer m >= 0, got {self.m!r}")

    @property
    def r_m(self) -> float:
        return math.sqrt(2.0) * (0.75 * math.pi + self.m * math.pi)

    def envelope_gap(self, r: np.ndarray) -> np.ndarray:
        """Signed distance eps0(r) + W(1)^2 / r^2 to the envelope."""
        r = np.asarray(r, dtype=float)
        return epsilon0_curve(1.0, r) + OMEGA * OMEGA / (r * r)

    def bound(self) -> float:
        """Uniform envelope-gap bound exp(-m pi)/m^2 beyond r_m (m >= 1)."""
        if self.m < 1:
            raise DomainError("AuxiliaryPotential: gap bound needs m >= 1")
        return math.exp(-self.m * math.pi) / (self.m * self.m)

    def as_piecewise(self) -> PiecewisePotential:
        return PiecewisePotential(
            inner=lambda r: epsilon0_curve(1.0, np.asarray(r, dtype=float)),
            r0=self.r_m,
            k=OMEGA * OMEGA,
        )


@dataclass(frozen=True)
class LemmaBoundsRecord:
    """Certified-bound check at one (potential, lam, tilde_r) triple.

    tilde_r is the grid-aligned radius actually used. edge bounds are
    the certified ceilings on u(r0)^2 and u'(r0)^2 propagated from
    tilde_r; small bounds are the linear-growth ceilings A lam tilde_r
    and A lam on |u| and |u'| at tilde_r. ok ands the four comparisons.
    Truthiness follows ok so the record can gate control flow directly."""

    ok: bool
    lam: float
    amplitude: float
    tilde_r: float
    u_tilde: float
    du_tilde: float
    u_edge: float
    du_edge: float
    edge_sq_bound: float
    slope_sq_bound: float
    small_bound: float
    slope_small_bound: float

    def __bool__(self) -> bool:
        return self.ok


def lemma_bounds_check(
    potential: PiecewisePotential,
    lam: float,
    tilde_r: float,
    *,
    amplitude: float = 1.0,
) -> LemmaBoundsRecord:
    """Verify the a-priori edge and small-radius bounds on a solution.

    Integrates u'' = (V + lam^2) u with u(0) = 0, u'(0) = amplitude lam
    and checks, at the grid radius nearest tilde_r, the two certified
    inequalities that propagate u to the core edge,

        u(r0)^2  <= [u'(tr)^2 - (V(tr) + lam^2) u(tr)^2] r0^2 / (k - r0^2 lam^2),
        u'(r0)^2 <= u'(tr)^2 - (V(tr) + lam^2) u(tr)^2,

    together with the small-radius linear bounds |u(tr)| <= A lam tr and
    |u'(tr)| <= A lam (the latter pair holds modulo O(lam^2), so expect
    slack only for small lam). Hypothesis failures raise
    PreconditionError; a bound failure is reported as ok=False, not an
    exception."""
    if not isinstance(potential, PiecewisePotential):
        raise DomainError("lemma_bounds_check: expected a PiecewisePotential")
    if not (lam > 0.0) or not math.isfinite(lam):
        raise DomainError(f"lemma_bounds_check: bad lam {lam!r}")
    if not (amplitude > 0.0) or not math.isfinite(amplitude):
        raise DomainError(f"lemma_bounds_check: bad amplitude {amplitude!r}")
    if not (tilde_r > 0.0) or not math.isfinite(tilde_r):
        raise DomainError(f"lemma_bounds_check: bad tilde_r {tilde_r!r}")
    r0, k = potential.r0, potential.k
    if not lam * r0 < math.sqrt(k):
        raise PreconditionError(
            f"lemma_bounds_check: need lam r0 < sqrt(k), got {lam * r0!r}"
        )
    if tilde_r >= r0:
        raise PreconditionError("lemma_bounds_check: tilde_r must lie inside r0")

    # hypotheses on the window [tilde_r, r0]: non-decreasing V and
    # |V| >= k / r0^2 throughout (tiny relative slack for roundoff)
    win = np.linspace(tilde_r, r0, 400)
    vw = np.asarray(potential.inner(win), dtype=float)
    scale = float(np.max(np.abs(vw))) or 1.0
    if np.any(np.diff(vw) < -1e-12 * scale):
        raise PreconditionError("lemma_bounds_check: V decreases on [tilde_r, r0]")
    if np.any(np.abs(vw) < (k / (r0 * r0)) * (1.0 - 1e-9)):
        raise PreconditionError(
            "lemma_bounds_check: |V| < k / r0^2 somewhere on [tilde_r, r0]"
        )

    rec = shoot(potential.as_radial(), lam)
    if rec.rescales:
        raise PontspecError("lemma_bounds_check: solution overflowed working scale")
    # kernel integrates with u'(0) = 1; rescale to the stated seed
    a_lam = amplitude * lam
    h = rec.radii[1] - rec.radii[0]
    idx = int(round(tilde_r / h))
    idx = min(max(idx, 2), len(rec.radii) - 3)
    tr = float(rec.radii[idx])
    u_t = a_lam * float(rec.u[idx])
    du_t = a_lam * rec.derivative(idx)
    u_e = a_lam * float(rec.u[-1])
    du_e = a_lam * rec.du_match
    v_t = float(np.asarray(potential.inner(np.array([tr])), dtype=float)[0])
    drive = du_t * du_t - (v_t + lam * lam) * u_t * u_t
    edge_sq = drive * r0 * r0 / (k - (r0 * lam) ** 2)
    small = a_lam * tr
    ok = (
        u_e * u_e <= edge_sq
        and du_e * du_e <= drive
        and abs(u_t) <= small
        and abs(du_t) <= a_lam
    )
    return LemmaBoundsRecord(
        ok=bool(ok),
        lam=lam,
        amplitude=amplitude,
        tilde_r=tr,
        u_tilde=u_t,
        du_tilde=du_t,
        u_edge=u_e,
        du_edge=du_e,
        edge_sq_bound=edge_sq,
        slope_sq_bound=drive,
        small_bound=small,
        slope_small_bound=a_lam,
    )
