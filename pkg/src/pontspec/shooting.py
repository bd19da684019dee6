"""Bound levels of radial Schrodinger operators by Numerov shooting.

The operator is -u'' + V(r) u = E u on the half line with u(0) = 0 and a
declared analytic tail: V(r) = 0 (free) or V(r) = -k/r^2 (inverse_square)
for r >= r_core. Because the tail form is exact beyond r_core, the
decaying solution there is known in closed form (exp(-lam r), respectively
sqrt(r) K_{i beta}(lam r) with beta = sqrt(k - 1/4)), so the match is done
at r_core itself. Integrating only over the core keeps the forward sweep
away from long classically forbidden stretches, where admixture of the
growing mode would swamp the Wronskian.

Eigenvalues are zeros of the normalized Wronskian between the forward
solution and the tail direction. Free tails are bracketed through node
count transitions (monotone in lam); inverse-square tails are scanned on
a logarithmic grid tuned to the tail's log period pi/beta, which also
captures the geometric accumulation of levels toward E = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, MissingLevelError
from .special import bessel_k_imag_order

__all__ = [
    "RadialPotential",
    "LevelResult",
    "ShootRecord",
    "find_levels",
    "shoot",
]

_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250
_LAM_FLOOR = 1e-13
_MAX_POINTS = 2_000_000


@dataclass(frozen=True)
class RadialPotential:
    """Radial potential with an exact analytic tail.

    v must be vectorized and valid on (0, r_core]; it is never evaluated
    beyond r_core + one grid step, where the tail form is used instead.
    The inverse-square tail requires k > 1/4 (the regime with infinitely
    many levels); k is meaningless for a free tail and must stay 0."""

    v: Callable[[np.ndarray], np.ndarray]
    r_core: float
    tail: str = "free"
    k: float = 0.0

    def __post_init__(self):
        if not (self.r_core > 0.0) or not math.isfinite(self.r_core):
            raise DomainError(f"RadialPotential: bad core radius {self.r_core!r}")
        if self.tail not in ("free", "inverse_square"):
            raise DomainError(f"RadialPotential: unknown tail {self.tail!r}")
        if self.tail == "free" and self.k != 0.0:
            raise DomainError("RadialPotential: free tail takes no k")
        if self.tail == "inverse_square" and not (self.k > 0.25):
            raise DomainError(
                "RadialPotential: inverse-square tail needs k > 1/4, "
                f"got {self.k!r}"
            )

    def tail_value(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.tail == "free":
            return np.zeros_like(r)
        return -self.k / (r * r)

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        """Full potential, core callable inside r_core and tail beyond."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0):
            raise DomainError("evaluate: radii must be positive")
        core = r <= self.r_core
        out = self.tail_value(np.where(core, self.r_core, r))
        if np.any(core):
            out = np.where(core, self.v(np.minimum(r, self.r_core)), out)
        return out


@dataclass(frozen=True)
class LevelResult:
    """Bound levels, deepest first; delivered may fall short of requested
    when the spectrum is exhausted or levels fall below the lam floor."""

    energies: tuple[float, ...]
    lambdas: tuple[float, ...]
    requested: int
    delivered: int
    points: int
    step: float
    halvings: int


@dataclass(frozen=True)
class ShootRecord:
    """One forward sweep at fixed lam.

    Samples run from the first grid point to r_core (u[-1] is the match
    value). nodes counts sign changes along the sweep, rescales the
    number of overflow renormalizations, and mismatch the normalized
    Wronskian against the tail direction."""

    lam: float
    radii: np.ndarray
    u: np.ndarray
    du_match: float
    nodes: int
    rescales: int
    mismatch: float

    def derivative(self, index: int) -> float:
        """Fourth-order derivative of u at an interior sample."""
        if not 0 < index < len(self.u) - 1:
            raise DomainError("derivative: need an interior sample index")
        h = self.radii[1] - self.radii[0]
        q = self._q
        cp = 1.0 - h * h * q[index + 1] / 6.0
        cm = 1.0 - h * h * q[index - 1] / 6.0
        return (cp * self.u[index + 1] - cm * self.u[index - 1]) / (2.0 * h)

    @property
    def _q(self) -> np.ndarray:
        return self.__dict__["_q_arr"]


@njit(cache=True)
def _numerov_forward(v_arr, h, lam2):
    """March u'' = (V + lam^2) u from u(0)=0 across the stored grid.

    v_arr[j-1] = V(j h) for j = 1..M with M h = r_core. Returns the
    (uniformly rescaled) samples, the node count along the sweep, and
    the number of rescale events."""
    m = v_arr.shape[0]
    u = np.empty(m)
    q1 = v_arr[0] + lam2
    q2 = v_arr[1] + lam2
    q0 = 2.0 * q1 - q2
    # 4th-order Taylor seed off the origin with u'(0) = 1
    u1 = h + h * h * h * (3.0 * q1 - q2) / 12.0
    u[0] = u1
    up = 0.0
    uc = u1
    tp = h * h * q0 / 12.0
    tc = h * h * q1 / 12.0
    nodes = 0
    rescales = 0
    neg_prev = uc < 0.0
    for idx in range(1, m):
        tn = h * h * (v_arr[idx] + lam2) / 12.0
        un = ((2.0 + 10.0 * tc) * uc - (1.0 - tp) * up) / (1.0 - tn)
        up = uc
        uc = un
        tp = tc
        tc = tn
        u[idx] = un
        if abs(un) > _RESCALE_AT:
            up *= _RESCALE_BY
            uc *= _RESCALE_BY
            for j in range(idx + 1):
                u[j] *= _RESCALE_BY
            rescales += 1
        neg_cur = uc < 0.0
        if neg_cur != neg_prev:
            nodes += 1
        neg_prev = neg_cur
    return u, nodes, rescales


def _grid(pot: RadialPotential, points: int) -> tuple[np.ndarray, float]:
    if points < 8:
        raise DomainError("grid needs at least 8 points")
    h = pot.r_core / points
    r = h * np.arange(1, points + 1)
    vals = np.asarray(pot.v(r), dtype=float)
    if vals.shape != r.shape or not np.all(np.isfinite(vals)):
        raise DomainError("potential evaluated non-finite on the core grid")
    return vals, h


def _endpoint_derivative(u: np.ndarray, h: float) -> float:
    """One-sided 4th-order derivative at the last sample.

    Uses core-side samples only, so a potential jump at r_core (where
    the tail takes over) cannot contaminate it."""
    return (
        25.0 * u[-1] - 48.0 * u[-2] + 36.0 * u[-3] - 16.0 * u[-4] + 3.0 * u[-5]
    ) / (12.0 * h)


def _tail_direction(pot: RadialPotential, lam: float, beta: float) -> tuple[float, float]:
    r = pot.r_core
    if pot.tail == "free":
        return 1.0, -lam
    tau = lam * r
    kb = bessel_k_imag_order(beta, tau)
    sq = math.sqrt(r)
    ut = sq * kb.value
    dut = 0.5 * kb.value / sq + sq * lam * kb.derivative
    scale = abs(ut) + abs(dut)
    if scale == 0.0:
        raise ConvergenceError(f"tail direction vanished at lam={lam!r}")
    return ut / scale, dut / scale


def _sweep(v_arr: np.ndarray, h: float, lam: float) -> tuple[float, float, int, int]:
    """Forward solution value and derivative at the match point."""
    u, nodes, rescales = _numerov_forward(v_arr, h, lam * lam)
    return u[-1], _endpoint_derivative(u, h), nodes, rescales


def _mismatch(v_arr, h, pot, beta, lam) -> float:
    um, du, _, _ = _sweep(v_arr, h, lam)
    ut, dut = _tail_direction(pot, lam, beta)
    return (du * ut - um * dut) / (abs(um) + abs(du))


def _node_count(v_arr, h, lam) -> int:
    """Half-line node count for the free tail.

    Core sign changes alone undercount when the outermost node sits
    beyond the match radius, so add the single node the continued tail
    solution still has when u and u' are opposed strongly enough. The
    corrected count steps exactly at eigenvalues."""
    um, du, nodes, _ = _sweep(v_arr, h, lam)
    if um * du < 0.0 and lam * abs(um) < abs(du):
        nodes += 1
    return nodes


def _lambda_ceiling(v_arr: np.ndarray, pot: RadialPotential) -> float:
    v_min = float(v_arr[:-1].min())
    if pot.tail == "inverse_square":
        v_min = min(v_min, -pot.k / pot.r_core**2)
    if v_min >= 0.0:
        return 0.0
    return 0.999999 * math.sqrt(-v_min)


def _base_points(pot: RadialPotential, v_arr: np.ndarray, lam_hi: float) -> int:
    q_max = math.sqrt(float(np.max(np.abs(v_arr))) + lam_hi * lam_hi)
    pts = int(math.ceil(100.0 * pot.r_core * max(q_max, 1e-6)))
    return min(max(pts, 512), _MAX_POINTS)


def _transition(v_arr, h, target, lam_deep, lam_shallow):
    """Shrink [lam_deep, lam_shallow] around the node count step
    target -> target+1; node count is nonincreasing in lam."""
    a, b = lam_deep, lam_shallow
    for _ in range(200):
        if b - a <= 1e-13 * b:
            break
        mid = 0.5 * (a + b)
        if _node_count(v_arr, h, mid) >= target + 1:
            a = mid
        else:
            b = mid
    return a, b


def _scan_free(v_arr, h, pot, lam_hi, n_levels):
    """Bracket levels through node transitions, then root the Wronskian."""
    if _node_count(v_arr, h, lam_hi) != 0:
        raise ConvergenceError("node count nonzero at the depth ceiling")
    floor = max(_LAM_FLOOR, 1e-9 * lam_hi)
    roots: list[float] = []
    # the node count steps from n to n+1 exactly at level n, so the
    # shrunken transition interval itself brackets the eigenvalue;
    # `upper` tracks the deep edge of the previous transition
    upper = lam_hi

    def wronsk(s):
        return _mismatch(v_arr, h, pot, 0.0, s)

    for n in range(n_levels):
        probe = upper / 2.0
        while probe > floor and _node_count(v_arr, h, probe) < n + 1:
            probe /= 10.0
        if probe <= floor:
            break  # spectrum exhausted
        deep_edge, shallow_edge = _transition(v_arr, h, n, probe, upper)
        # the root normally sits inside the transition interval; the
        # window up to the previous transition is kept as a fallback
        # against sign flickers at the shrunken edges
        fa = wronsk(deep_edge)
        fb = wronsk(shallow_edge)
        if fa == 0.0:
            lam = deep_edge
        elif fb == 0.0:
            lam = shallow_edge
        elif fa * fb < 0.0:
            lam = brentq(wronsk, deep_edge, shallow_edge, rtol=8.9e-16, xtol=1e-300, maxiter=200)
        else:
            fc = wronsk(upper)
            if fb * fc < 0.0:
                lam = brentq(wronsk, shallow_edge, upper, rtol=8.9e-16, xtol=1e-300, maxiter=200)
            elif fc == 0.0:
                lam = upper
            else:
                raise MissingLevelError(
                    f"could not isolate level {n}: no mismatch sign change "
                    f"around the node transition at {shallow_edge!r}"
                )
        roots.append(lam)
        upper = deep_edge
    return roots


def _scan_inverse_square(v_arr, h, pot, lam_hi, n_levels):
    """Log-grid sign scan of the Wronskian, ten points per tail half period."""
    beta = math.sqrt(pot.k - 0.25)
    shrink = math.exp(-math.pi / (10.0 * beta))
    roots: list[float] = []
    lam = lam_hi
    w_prev = _mismatch(v_arr, h, pot, beta, lam)
    while len(roots) < n_levels and lam > _LAM_FLOOR:
        lam_next = lam * shrink
        w_next = _mismatch(v_arr, h, pot, beta, lam_next)
        if w_prev == 0.0:
            roots.append(lam)
        elif w_prev * w_next < 0.0:
            roots.append(
                brentq(
                    lambda s: _mismatch(v_arr, h, pot, beta, s),
                    lam_next,
                    lam,
                    rtol=8.9e-16,
                    xtol=1e-300,
                    maxiter=200,
                )
            )
        lam = lam_next
        w_prev = w_next
    return roots


def _refine_root(v_arr, h, pot, beta, lam_guess, lam_hi):
    width = 1e-4
    for _ in range(5):
        a = lam_guess * (1.0 - width)
        b = min(lam_guess * (1.0 + width), lam_hi)
        fa = _mismatch(v_arr, h, pot, beta, a)
        fb = _mismatch(v_arr, h, pot, beta, b)
        if fa * fb < 0.0:
            return brentq(
                lambda s: _mismatch(v_arr, h, pot, beta, s), a, b, rtol=8.9e-16,
                xtol=1e-300, maxiter=200,
            )
        width *= 8.0
    raise ConvergenceError(
        f"level near lam={lam_guess!r} not recovered on the refined grid"
    )


def find_levels(
    pot: RadialPotential,
    n_levels: int,
    *,
    bracket: tuple[float, float] | None = None,
    points: int | None = None,
    target_rel: float = 1e-8,
    max_halvings: int = 3,
) -> LevelResult:
    """Deepest n_levels bound states, verified by grid halving.

    Roots found on the base grid are re-rooted on successively halved
    grids until consecutive lambdas agree to target_rel (capped at
    max_halvings); the finest values are returned. An optional energy
    bracket (e_lo, e_hi) keeps only the levels inside it; a bracket
    with no negative part yields an empty result."""
    if n_levels < 1:
        raise DomainError("find_levels: need n_levels >= 1")
    if bracket is not None:
        e_lo, e_hi = bracket
        if not (e_lo < e_hi) or math.isnan(e_lo) or math.isnan(e_hi):
            raise DomainError(f"find_levels: bad energy bracket {bracket!r}")
    v_arr, h = _grid(pot, points or 512)
    if bracket is not None and e_lo >= 0.0:
        return LevelResult((), (), n_levels, 0, len(v_arr), h, 0)
    lam_hi = _lambda_ceiling(v_arr, pot)
    if lam_hi == 0.0:
        return LevelResult((), (), n_levels, 0, len(v_arr), h, 0)
    n_pts = points if points is not None else _base_points(pot, v_arr, lam_hi)
    if n_pts != len(v_arr):
        v_arr, h = _grid(pot, n_pts)
        lam_hi = _lambda_ceiling(v_arr, pot)
    if pot.tail == "inverse_square":
        beta = math.sqrt(pot.k - 0.25)
        roots = _scan_inverse_square(v_arr, h, pot, lam_hi, n_levels)
    else:
        beta = 0.0
        roots = _scan_free(v_arr, h, pot, lam_hi, n_levels)

    halvings = 0
    while roots and halvings < max_halvings:
        n_fine = 2 * n_pts
        if n_fine > _MAX_POINTS:
            break
        v_fine, h_fine = _grid(pot, n_fine)
        refined = [
            _refine_root(v_fine, h_fine, pot, beta, lam, lam_hi) for lam in roots
        ]
        halvings += 1
        drift = max(
            abs(new - old) / new for new, old in zip(refined, roots)
        )
        roots, n_pts, v_arr, h = refined, n_fine, v_fine, h_fine
        if drift <= target_rel:
            break

    lams = tuple(roots)
    if bracket is not None:
        lams = tuple(
            lam for lam in lams if e_lo <= -(lam * lam) <= e_hi
        )
    return LevelResult(
        energies=tuple(-(lam * lam) for lam in lams),
        lambdas=lams,
        requested=n_levels,
        delivered=len(lams),
        points=n_pts,
        step=h,
        halvings=halvings,
    )


def shoot(pot: RadialPotential, lam: float, *, points: int | None = None) -> ShootRecord:
    """Single forward sweep at fixed lam, for diagnostics and bound checks."""
    if not (lam > 0.0) or not math.isfinite(lam):
        raise DomainError(f"shoot: lam={lam!r} must be positive")
    v_arr, h = _grid(pot, points or 512)
    if points is None:
        n_pts = _base_points(pot, v_arr, lam)
        if n_pts != len(v_arr):
            v_arr, h = _grid(pot, n_pts)
    if h * h * (float(np.max(np.abs(v_arr))) + lam * lam) >= 0.1:
        raise DomainError("shoot: step too coarse, need h^2 max|V + lam^2| < 0.1")
    beta = math.sqrt(pot.k - 0.25) if pot.tail == "inverse_square" else 0.0
    lam2 = lam * lam
    u, nodes, rescales = _numerov_forward(v_arr, h, lam2)
    du = _endpoint_derivative(u, h)
    ut, dut = _tail_direction(pot, lam, beta)
    mism = (du * ut - u[-1] * dut) / (abs(u[-1]) + abs(du))
    rec = ShootRecord(
        lam=lam,
        radii=h * np.arange(1, len(u) + 1),
        u=u,
        du_match=du,
        nodes=nodes,
        rescales=rescales,
        mismatch=mism,
    )
    object.__setattr__(rec, "_q_arr", v_arr + lam2)
    return rec
