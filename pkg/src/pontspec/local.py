"""Bound states and scattering of the local n-center point interaction.

Eigenvalues E = -lam are the zeros of det Gamma(lam). The generic route
scans the determinant's sign on a uniform grid in s = sqrt(lam) and
polishes each bracket with a bracketing root finder; no derivative-based
iteration is used anywhere because the determinant is nearly flat near
collapse configurations. For the symmetric two-center configuration the
determinant factorizes,

    det Gamma = (alpha + s/4pi - e^{-s r}/(4pi r)) (alpha + s/4pi + e^{-s r}/(4pi r)),

and each factor is strictly monotone in s, which cleanly resolves the
near-degenerate root pairs (split ~ 2 e^{4 pi alpha r}) that any panel scan
of the full determinant would need absurd resolution to see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, SingularMatrixError
from .gamma import FOUR_PI, CenterConfig, _gamma_local_stack, resolvent_coefficient_sum
from .special import OMEGA, lambert_w0

__all__ = [
    "LocalSpectrum",
    "LocalScattering",
    "CollapseSample",
    "local_eigenvalues",
    "symmetric_pair_eigenvalues",
    "local_scattering_length",
    "collapse_diagnostic",
]


@dataclass(frozen=True)
class LocalSpectrum:
    """Negative spectrum of one local configuration.

    energies are ascending (deepest bound state first); lambdas = -energies
    in the same order. ceiling is the top of the scanned lam window and
    panels the number of scan intervals; the factorized route needs neither
    and records ceiling=inf, panels=0.
    """

    energies: tuple[float, ...]
    lambdas: tuple[float, ...]
    ceiling: float
    panels: int
    method: str


@dataclass(frozen=True)
class LocalScattering:
    """Zero-energy scattering length; diverged marks a zero-energy resonance."""

    value: float
    diverged: bool


@dataclass(frozen=True)
class CollapseSample:
    """Deepest two-center eigenvalue at separation r.

    scale = lam * r^2 is the collapse invariant (-> OMEGA**2 as r -> 0);
    reference is the same quantity from the closed Lambert form, an
    independent route kept alongside the transcendental root."""

    r: float
    lam: float
    scale: float
    reference: float


def _det_at(config: CenterConfig, s: float) -> float:
    return float(np.linalg.det(_gamma_local_stack(config, np.array([s * s]))[0]))


def _auto_ceiling(config: CenterConfig) -> float:
    """Heuristic lam window covering single-center depths and pair collapse."""
    cands = [1.0]
    for a in config.alphas:
        if a < 0.0:
            cands.append((FOUR_PI * a) ** 2)
    d = config.distances()
    n = config.n
    for j in range(n):
        for k in range(j + 1, n):
            c = FOUR_PI * min(config.alphas[j], config.alphas[k]) * d[j, k]
            if c < 1.0:
                s_pair = lambert_w0(math.exp(c)).value - c
                cands.append((s_pair / d[j, k]) ** 2)
    return 4.0 * n * n * max(cands)


def local_eigenvalues(
    config: CenterConfig, ceiling: float | None = None, panels: int = 20000
) -> LocalSpectrum:
    """All zeros of det Gamma in (0, ceiling] by sign scan plus Brent.

    The scan resolution is sqrt(ceiling)/panels in s = sqrt(lam); root
    pairs closer than that merge or vanish from the sign pattern. The
    automatic ceiling covers single-center depths and pairwise collapse
    scales with a margin; pass ceiling explicitly for unusual geometries.
    """
    if ceiling is None:
        ceiling = _auto_ceiling(config)
    if not (ceiling > 0.0) or not math.isfinite(ceiling):
        raise DomainError(f"local_eigenvalues: bad ceiling {ceiling!r}")
    if panels < 2:
        raise DomainError("local_eigenvalues: need at least 2 panels")
    s_grid = np.linspace(0.0, math.sqrt(ceiling), panels + 1)
    dets = np.linalg.det(_gamma_local_stack(config, s_grid * s_grid))
    sgn = np.sign(dets)

    roots: list[float] = []
    for i in np.nonzero(sgn == 0.0)[0]:
        if s_grid[i] > 0.0:
            roots.append(float(s_grid[i]))
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0.0)[0]
    for i in flips:
        s_root = brentq(
            lambda s: _det_at(config, s),
            s_grid[i],
            s_grid[i + 1],
            xtol=1e-13 * max(1.0, s_grid[-1]),
            rtol=8.9e-16,
        )
        if s_root > 0.0:
            roots.append(float(s_root))

    roots.sort()
    lams = tuple(s * s for s in roots)
    energies = tuple(sorted(-l for l in lams))
    return LocalSpectrum(
        energies=energies,
        lambdas=tuple(sorted(lams, reverse=True)),
        ceiling=float(ceiling),
        panels=panels,
        method="det-scan",
    )


def symmetric_pair_eigenvalues(alpha: float, r: float) -> LocalSpectrum:
    """Both determinant factors of the symmetric pair, root by root.

    In s = sqrt(lam) r the factors reduce to s + c -+ e^{-s} with
    c = 4 pi alpha r: the even factor has one root iff c < 1, the odd one
    iff c < -1, and both are monotone, so plain bracketing is exact."""
    if r <= 0.0:
        raise DomainError("symmetric_pair_eigenvalues: separation must be positive")
    c = FOUR_PI * alpha * r
    roots_s: list[float] = []
    if c < 1.0:
        hi = max(1.0, -c) + 2.0
        roots_s.append(brentq(lambda s: s + c - math.exp(-s), 0.0, hi, xtol=1e-15, rtol=8.9e-16))
    if c < -1.0:
        hi = -c + 2.0
        roots_s.append(brentq(lambda s: s + c + math.exp(-s), 0.0, hi, xtol=1e-15, rtol=8.9e-16))
    lams = tuple(sorted(((s / r) ** 2 for s in roots_s), reverse=True))
    return LocalSpectrum(
        energies=tuple(sorted(-l for l in lams)),
        lambdas=lams,
        ceiling=math.inf,
        panels=0,
        method="factorized",
    )


def local_scattering_length(config: CenterConfig) -> LocalScattering:
    """-(1/4pi) 1^T Gamma(0)^{-1} 1; a singular Gamma(0) is a resonance."""
    m = _gamma_local_stack(config, np.array([0.0]))[0]
    try:
        total = resolvent_coefficient_sum(m)
    except SingularMatrixError:
        return LocalScattering(value=math.inf, diverged=True)
    return LocalScattering(value=-float(total.real) / FOUR_PI, diverged=False)


def collapse_diagnostic(alpha: float, r_values) -> list[CollapseSample]:
    """Deepest symmetric-pair eigenvalue and lam r^2 along a separation list.

    The root comes from bracketing the even determinant factor; the
    reference column re-derives lam r^2 = (W0(e^c) - c)^2 through Lambert W
    as an independent closed-form route. Separations whose even factor has
    no root (c >= 1) record NaNs."""
    out: list[CollapseSample] = []
    for r in np.atleast_1d(np.asarray(r_values, dtype=float)):
        r = float(r)
        spec = symmetric_pair_eigenvalues(alpha, r)
        c = FOUR_PI * alpha * r
        if spec.lambdas and c < 1.0:
            lam = spec.lambdas[0]
            ref = (lambert_w0(math.exp(c)).value - c) ** 2
            out.append(CollapseSample(r=r, lam=lam, scale=lam * r * r, reference=ref))
        else:
            out.append(CollapseSample(r=r, lam=math.nan, scale=math.nan, reference=math.nan))
    return out
