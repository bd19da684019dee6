"""Heavy-heavy-light assembly in the Born-Oppenheimer factorization.

In Jacobi coordinates the three-body Hamiltonian splits into a fast
light-particle problem at fixed heavy separation R, with kinetic
coefficient 1/nu (nu = 2M/(2M+m)), and a slow heavy-pair problem with
coefficient 1/mu (mu = M/(2m)) moving in the fast ground eigenvalue
eps(R). The fast problem is the symmetric two-center one: its even
eigenvalue condition is the unit-coefficient condition with lam
replaced by nu lam at the same physical separation, which closes to

    eps(R) = epsilon0(R, t_theta) / nu.

That reduction is re-validated here against direct root-finding of the
nu-scaled condition (50 separations, once per (nu, t) pair) rather than
assumed. Multiplying the slow equation through by mu gives a radial
problem whose tail strength is effective_k = mu W0(1)^2 / nu at the
unitary phase t_theta = 1; when that exceeds 1/4 the heavy pair
inherits the geometric accumulation of levels, with bounded energies
(no fall to the center). The phase-less local pair, by contrast, keeps
lam r^2 constant down to zero separation, which is the instability the
demo table exhibits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .special import OMEGA
from .efimov import PiecewisePotential, numeric_levels
from .shooting import RadialPotential, find_levels
from .local import symmetric_pair_eigenvalues
from .twocenter import epsilon0, epsilon0_curve, g_functions

__all__ = [
    "BOConfig",
    "BOSpectrum",
    "InstabilityRow",
    "effective_potential",
    "bo_levels",
    "local_bo_instability_demo",
]


@dataclass(frozen=True)
class BOConfig:
    """Masses and interaction phase of the two-boson-plus-light system.

    The Jacobi kinetic coefficients nu = 2M/(2M+m) and mu = M/(2m) are
    derived from the masses, never set independently. The phase
    parameter must satisfy t_theta <= 1 so the even fast branch exists
    at every separation."""

    m_light: float
    M_heavy: float
    t_theta: float = 1.0

    def __post_init__(self):
        for name, val in (("m_light", self.m_light), ("M_heavy", self.M_heavy)):
            if not (val > 0.0) or not math.isfinite(val):
                raise DomainError(f"BOConfig: {name} must be positive, got {val!r}")
        if not (self.t_theta <= 1.0):
            raise DomainError(f"BOConfig: need t_theta <= 1, got {self.t_theta!r}")

    @property
    def nu(self) -> float:
        return 2.0 * self.M_heavy / (2.0 * self.M_heavy + self.m_light)

    @property
    def mu(self) -> float:
        return self.M_heavy / (2.0 * self.m_light)


@dataclass(frozen=True)
class BOSpectrum:
    """Slow-problem levels with their tail diagnostics.

    levels are three-body energies E_n, deepest first; ratios the
    successive quotients E_n / E_{n+1}. effective_k = mu W0(1)^2 / nu is
    the tail strength the mu-cleared radial problem actually carries and
    bare_k = W0(1)^2 / nu the strength as stated before clearing; both
    are reported because the criticality condition is quoted in the
    uncleared form. efimov_regime marks the accumulating case
    (t_theta = 1 and effective_k > 1/4). continuum_edge is eps(inf),
    the bottom of the essential spectrum (0 at the unitary phase); for
    t_theta < 1 the finitely many levels sit below it."""

    levels: tuple[float, ...]
    ratios: tuple[float, ...]
    effective_k: float
    bare_k: float
    efimov_regime: bool
    continuum_edge: float
    requested: int
    delivered: int
    nodes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.requested < 1:
            raise DomainError(f"BOSpectrum: bad request count {self.requested!r}")
        if self.delivered != len(self.levels) or self.delivered > self.requested:
            raise DomainError("BOSpectrum: delivered count disagrees with levels")
        if len(self.ratios) != max(0, len(self.levels) - 1):
            raise DomainError("BOSpectrum: ratio count disagrees with levels")
        if any(not (e < 0.0) for e in self.levels):
            raise DomainError("BOSpectrum: levels must be negative")
        if any(a >= b for a, b in zip(self.levels, self.levels[1:])):
            raise DomainError("BOSpectrum: levels must increase strictly")


@lru_cache(maxsize=32)
def _check_reduction(nu: float, t_theta: float) -> None:
    """Validate eps(r) = epsilon0(r, t)/nu against direct root-finding.

    The nu-scaled even condition sqrt(nu lam) r + g0 - exp(-sqrt(nu lam) r)
    = 0 is solved by bracketing in s = sqrt(nu lam) r and compared with
    the Lambert closed form on 50 log-spaced separations."""
    for r in np.geomspace(0.1, 30.0, 50):
        r = float(r)
        g0, _ = g_functions(r, t_theta)
        s = brentq(
            lambda s_: s_ + g0 - math.exp(-s_),
            0.0,
            max(1.0, -g0) + 2.0,
            rtol=8.9e-16,
            xtol=1e-15,
        )
        lam_direct = s * s / (nu * r * r)
        lam_closed = -epsilon0(t_theta, r).value / nu
        if abs(lam_direct - lam_closed) > 1e-10 * max(lam_closed, 1e-300):
            raise ConvergenceError(
                f"effective-potential reduction failed validation at r={r!r}"
            )


def effective_potential(config: BOConfig, r: float) -> float:
    """Fast-problem ground eigenvalue eps(r) at heavy separation r."""
    if not isinstance(config, BOConfig):
        raise DomainError("effective_potential: expected a BOConfig")
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError(f"effective_potential: bad separation {r!r}")
    _check_reduction(config.nu, config.t_theta)
    branch = epsilon0(config.t_theta, r)
    if not branch.exists:
        raise DomainError(f"effective_potential: even branch absent at r={r!r}")
    return branch.value / config.nu


# cut the unitary-phase potential at an exact envelope crossing; the
# residual oscillation beyond sqrt(2)(3 pi/4 + 4 pi) is ~1e-9 of the tail
_CUT_INDEX = 4


def bo_levels(config: BOConfig, n_max: int, *, target_rel: float = 1e-8) -> BOSpectrum:
    """Deepest n_max three-body levels in the factorized approximation.

    The slow equation is multiplied through by mu and handed to the
    radial machinery. At t_theta = 1 with effective_k > 1/4 the
    mu-cleared potential is glued to its exact -effective_k/R^2 tail at
    an envelope crossing and the accumulating spectrum is returned;
    sub-critical unitary configs report the no-accumulation regime with
    no levels (neither tail family applies to a 1/R^2 tail at or below
    the critical strength). For t_theta < 1 the potential tends to a
    negative constant exponentially fast, so the shifted problem runs
    with a free tail and delivers the finitely many levels below the
    continuum edge."""
    if not isinstance(config, BOConfig):
        raise DomainError("bo_levels: expected a BOConfig")
    if n_max < 1:
        raise DomainError(f"bo_levels: need n_max >= 1, got {n_max!r}")
    _check_reduction(config.nu, config.t_theta)
    mu, nu, t = config.mu, config.nu, config.t_theta
    bare_k = OMEGA * OMEGA / nu
    k_eff = mu * bare_k
    scale = mu / nu

    if t == 1.0:
        if k_eff <= 0.25:
            return BOSpectrum(
                levels=(),
                ratios=(),
                effective_k=k_eff,
                bare_k=bare_k,
                efimov_regime=False,
                continuum_edge=0.0,
                requested=n_max,
                delivered=0,
            )
        r_cut = math.sqrt(2.0) * (0.75 * math.pi + _CUT_INDEX * math.pi)
        pot = PiecewisePotential(
            inner=lambda R: scale * epsilon0_curve(1.0, np.asarray(R, dtype=float)),
            r0=r_cut,
            k=k_eff,
        )
        acc = numeric_levels(pot, n_max, target_rel=target_rel)
        return BOSpectrum(
            levels=tuple(e / mu for e in acc.levels),
            ratios=acc.ratios,
            effective_k=k_eff,
            bare_k=bare_k,
            efimov_regime=True,
            continuum_edge=0.0,
            requested=n_max,
            delivered=acc.delivered,
            nodes=acc.nodes,
        )

    if 1.0 - t < 1e-6:
        raise DomainError(
            "bo_levels: t_theta this close to 1 leaves the shifted tail "
            "below float resolution; use t_theta = 1 exactly"
        )
    # eps0 tends to -(1-t)^2/2 with an e^{-r/sqrt(2)} oscillation, so
    # beyond this radius the shifted core is double-precision zero
    edge = -((1.0 - t) ** 2) / (2.0 * nu)
    r_cut = math.sqrt(2.0) * 42.0

    def shifted(R: np.ndarray) -> np.ndarray:
        R = np.asarray(R, dtype=float)
        return scale * (epsilon0_curve(t, R) + 0.5 * (1.0 - t) ** 2)

    res = find_levels(
        RadialPotential(v=shifted, r_core=r_cut), n_max, target_rel=target_rel
    )
    levels = tuple(edge + e / mu for e in res.energies)
    ratios = tuple(
        levels[i] / levels[i + 1] for i in range(len(levels) - 1)
    )
    return BOSpectrum(
        levels=levels,
        ratios=ratios,
        effective_k=k_eff,
        bare_k=bare_k,
        efimov_regime=False,
        continuum_edge=edge,
        requested=n_max,
        delivered=res.delivered,
    )


@dataclass(frozen=True)
class InstabilityRow:
    """One separation of the local-pair contrast table."""

    r: float
    lam: float
    lam_r_squared: float


def local_bo_instability_demo(
    alpha: float = 0.0, r_grid: Sequence[float] | None = None
) -> tuple[InstabilityRow, ...]:
    """Ground light-particle eigenvalue of the local pair along r.

    The contrast case for the docs: with phase-less centers at scattering
    parameter alpha, lam(r) r^2 stays at W0(1)^2 as r -> 0 (exactly so
    for alpha = 0), so the heavy pair sees a -W0(1)^2/(nu r^2) potential
    at arbitrarily small separation and its spectrum is unbounded below.
    Separations without a bound even branch (4 pi alpha r >= 1) carry
    NaN rows."""
    if not math.isfinite(alpha):
        raise DomainError(f"local_bo_instability_demo: bad alpha {alpha!r}")
    if r_grid is None:
        r_grid = tuple(np.geomspace(1e-3, 10.0, 25))
    rows = []
    for r in r_grid:
        r = float(r)
        if not (r > 0.0) or not math.isfinite(r):
            raise DomainError(f"local_bo_instability_demo: bad separation {r!r}")
        pair = symmetric_pair_eigenvalues(alpha, r)
        if pair.lambdas:
            lam = pair.lambdas[0]
            rows.append(InstabilityRow(r=r, lam=lam, lam_r_squared=lam * r * r))
        else:
            rows.append(InstabilityRow(r=r, lam=math.nan, lam_r_squared=math.nan))
    return tuple(rows)
