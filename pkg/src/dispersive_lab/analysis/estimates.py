"""Dispersive, local-smoothing and Strichartz ratios for the linear flows."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dynamics import Trajectory
from ..errors import UsageError
from ..spectral import (
    Field,
    check_family,
    derivative_multiplier,
    fractional_derivative,
    identity_multiplier,
    linear_propagator,
)
from .norms import Lebesgue, MixedXT, conjugate, lp_sum, mixed_norm, norm


@dataclass(frozen=True)
class StrichartzPair:
    """Airy pair ``(q, p) = (6 / (theta (alpha + 1)), 2 / (1 - theta))`` with gain ``theta alpha / 2``."""

    theta: float
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise UsageError(f"theta must lie in [0, 1], got {self.theta!r}")
        if not 0.0 <= self.alpha <= 0.5:
            raise UsageError(f"alpha must lie in [0, 1/2], got {self.alpha!r}")

    @property
    def q(self) -> float:
        return math.inf if self.theta == 0 else 6.0 / (self.theta * (self.alpha + 1.0))

    @property
    def p(self) -> float:
        return math.inf if self.theta == 1 else 2.0 / (1.0 - self.theta)

    @property
    def gain(self) -> float:
        return 0.5 * self.theta * self.alpha

    def norm_spec(self) -> MixedXT:
        return MixedXT(p_x=self.p, q_t=self.q, order="t-outer")


@dataclass(frozen=True)
class SmoothingPair:
    """Space-outer pair ``L^{4/theta}_x L^{2/(1-theta)}_t`` with derivative ``D_x^{1 - 5 theta / 4}``.

    ``theta = 4/5`` is the scale-invariant ``L^5_x L^10_t``; ``theta = 0`` is
    the local smoothing norm ``L^inf_x L^2_t`` of ``D_x u``.
    """

    theta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta < 1.0:
            raise UsageError(f"theta must lie in [0, 1), got {self.theta!r}")

    @property
    def p(self) -> float:
        return math.inf if self.theta == 0 else 4.0 / self.theta

    @property
    def q(self) -> float:
        return 2.0 / (1.0 - self.theta)

    @property
    def order(self) -> float:
        return 1.0 - 1.25 * self.theta

    def norm_spec(self) -> MixedXT:
        return MixedXT(p_x=self.p, q_t=self.q, order="x-outer")


def dispersive_rate(family: str, d: int, r: float, alpha: float = 0.0) -> tuple[float, float, float]:
    """``(gain s, rate rho, rhs weight)`` of the dispersive estimate at exponent ``r``.

    The estimate reads ``||D^s U(t) u0||_r <~ |t|^{-rho} ||W u0||_{r'}`` where
    ``W`` is ``(-Delta)^{weight/2}`` (identity when ``weight = 0``).
    """
    if r < 2:
        raise UsageError(f"dispersive estimates need r >= 2, got {r!r}")
    if not 0.0 <= alpha <= 0.5:
        raise UsageError(f"alpha must lie in [0, 1/2], got {alpha!r}")
    check_family(family, d)
    theta = 1.0 if math.isinf(r) else (r - 2.0) / r
    if family == "airy":
        return theta * alpha, (alpha + 1.0) * theta / 3.0, 0.0
    if d == 2:
        return theta * alpha, (alpha + 2.0) * theta / 3.0, 0.0
    if alpha != 0.0:
        raise UsageError("the d >= 3 estimate carries no derivative gain; use alpha = 0")
    return 0.0, theta, (d - 3) * theta


def dispersive_ratio(u0: Field, family: str, t: float, r: float, alpha: float = 0.0) -> float:
    """``|t|^rho ||D^s U(t) u0||_{L^r} / ||W u0||_{L^{r'}}`` with the family's rate.

    ``D^s`` is ``D_x^s``; in one dimension this is ``|xi|^s``.
    """
    s, rho, weight = dispersive_rate(family, u0.grid.d, r, alpha)
    if t == 0 and rho > 0:
        raise UsageError("the dispersive ratio is evaluated at t != 0")
    evolved = linear_propagator(u0.physical(), t, family)
    if s != 0:
        evolved = fractional_derivative(evolved, s, "Dx")
    rhs_field = fractional_derivative(u0, weight, "laplacian") if weight != 0 else u0
    rhs = norm(rhs_field.physical(), Lebesgue(conjugate(r)))
    if rhs == 0:
        raise UsageError("initial data has zero dual norm")
    lhs = norm(evolved.physical(), Lebesgue(r))
    return abs(t) ** rho * lhs / rhs


# ---------------------------------------------------------------------------
# Local smoothing identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KatoResult:
    ratio: float
    x_star: float
    half_width: float
    n_times: int
    tail_fraction: float
    warning: str | None = None


def _kato_modes(u0: Field, rel_cut: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    spec = u0.spectral().data
    xi = u0.grid.xi(0)
    pos = xi > 0
    pos[u0.grid.n[0] // 2] = False
    amp = spec[pos]
    sup = float(np.max(np.abs(spec)))
    keep = np.abs(amp) > rel_cut * sup
    return xi[pos][keep], amp[keep]


def _kato_signal(xi: np.ndarray, coef: np.ndarray, x_star: float, times: np.ndarray, dxi: float) -> np.ndarray:
    """``(d/dx U(t) u0)(x_star)`` from the positive half of the spectrum (real signal)."""
    base = coef * (1j * xi) * np.exp(1j * xi * x_star) * dxi / math.sqrt(2.0 * math.pi)
    out = np.empty(times.size)
    chunk = max(1, 2_000_000 // max(1, xi.size))
    cube = xi**3
    for start in range(0, times.size, chunk):
        t = times[start : start + chunk, None]
        out[start : start + chunk] = 2.0 * np.real(np.exp(1j * t * cube) @ base)
    return out


def kato_smoothing_ratio(
    u0: Field,
    x_star: float = 0.0,
    times: np.ndarray | None = None,
    *,
    tail_tol: float = 1e-8,
    initial_half_width: float = 0.25,
    max_doublings: int = 14,
) -> KatoResult:
    """``||(d/dx U(t) u0)(x_star)||_{L^2_t} / ||u0||_{L^2_x}`` for the Airy flow.

    Without an explicit ``times`` array the symmetric window ``[-T, T]`` is
    doubled until the contribution of its outer half falls below
    ``tail_tol`` of the total, but never past the time at which the fastest
    energetic mode wraps around the periodic box.  The step resolves the
    fastest retained phase ``xi^3``.
    """
    check_family("airy", u0.grid.d)
    xi, coef = _kato_modes(u0)
    dxi = u0.grid.dxi[0]
    l2 = float(lp_sum(u0.values(), u0.grid.cell, 2.0))
    if l2 == 0 or xi.size == 0:
        raise UsageError("local smoothing ratio of zero data")

    def integral(ts: np.ndarray) -> tuple[float, np.ndarray]:
        v = _kato_signal(xi, coef, x_star, ts, dxi)
        return float(np.trapezoid(v * v, ts)), v

    if times is not None:
        ts = np.asarray(times, dtype=float)
        total, v = integral(ts)
        edge = max(abs(v[0]), abs(v[-1])) ** 2
        peak = float(np.max(v * v)) if v.size else 0.0
        warning = None
        if peak > 0 and edge > tail_tol * peak:
            warning = f"integrand at the window ends is {edge / peak:.2e} of its peak"
        return KatoResult(math.sqrt(total) / l2, x_star, float(ts[-1] - ts[0]) / 2, ts.size, math.nan, warning)

    step = 0.5 * math.pi / float(np.max(xi) ** 3)
    # modes carrying a non-negligible share of the energy wrap around the box
    # after (L/2) / (3 xi^2); the window must close before the fastest does
    energetic = xi[np.abs(coef) ** 2 > tail_tol * float(np.max(np.abs(coef))) ** 2]
    wrap = 0.5 * u0.grid.L[0] / (3.0 * float(np.max(energetic)) ** 2)
    half = min(initial_half_width, wrap)
    previous = None
    tail = math.inf
    for _ in range(max_doublings + 1):
        count = int(math.ceil(half / step))
        ts = np.linspace(-half, half, 2 * count + 1)
        total, _ = integral(ts)
        if previous is not None and total > 0:
            tail = abs(total - previous) / total
            if tail < tail_tol:
                break
        previous = total
        if half >= wrap:
            break
        half = min(2.0 * half, wrap)
    warning = None if tail < tail_tol else f"time tail fraction {tail:.2e} exceeds {tail_tol:.0e}"
    return KatoResult(math.sqrt(total) / l2, x_star, half, ts.size, tail, warning)


# ---------------------------------------------------------------------------
# Space-time ratios along linear trajectories
# ---------------------------------------------------------------------------


def _l2(u0: Field) -> float:
    value = float(lp_sum(u0.values(), u0.grid.cell, 2.0))
    if value == 0:
        raise UsageError("Strichartz ratio of zero data")
    return value


def strichartz_ratio(
    u0: Field,
    pair: StrichartzPair,
    traj: Trajectory,
    window: tuple[float, float] | None = None,
) -> float:
    """``||D_x^{theta alpha / 2} U(t) u0||_{L^q_t L^p_x} / ||u0||_{L^2}`` over the trajectory window."""
    if not isinstance(pair, StrichartzPair):
        raise UsageError("expected a StrichartzPair")
    op = derivative_multiplier(pair.gain, "Dx") if pair.gain else identity_multiplier()
    return mixed_norm(traj, pair.norm_spec(), window, op) / _l2(u0)


def smoothing_ratio(
    u0: Field,
    pair: SmoothingPair,
    traj: Trajectory,
    window: tuple[float, float] | None = None,
) -> float:
    """``||D_x^{1 - 5 theta / 4} U(t) u0||_{L^p_x L^q_t} / ||u0||_{L^2}``."""
    op = derivative_multiplier(pair.order, "Dx") if pair.order else identity_multiplier()
    if pair.order < 0:
        # the singular symbol needs zero-mean data; this raises otherwise
        fractional_derivative(u0, pair.order, "Dx")
    return mixed_norm(traj, pair.norm_spec(), window, op) / _l2(u0)


__all__ = [
    "StrichartzPair",
    "SmoothingPair",
    "KatoResult",
    "dispersive_rate",
    "dispersive_ratio",
    "kato_smoothing_ratio",
    "strichartz_ratio",
    "smoothing_ratio",
]
