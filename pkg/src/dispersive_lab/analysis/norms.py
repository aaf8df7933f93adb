"""Lebesgue, Lorentz, Sobolev, anisotropic and space-time norms of sampled fields."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from ..dynamics import Trajectory
from ..errors import SingularityError, UsageError
from ..spectral import Field, Multiplier, apply_multiplier


def _check_exponent(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or value < 1.0:
        raise UsageError(f"exponent {name} must lie in [1, inf], got {value!r}")
    return value


@dataclass(frozen=True)
class Lebesgue:
    p: float

    def __post_init__(self) -> None:
        _check_exponent("p", self.p)


@dataclass(frozen=True)
class Lorentz:
    p: float
    q: float

    def __post_init__(self) -> None:
        _check_exponent("p", self.p)
        _check_exponent("q", self.q)


@dataclass(frozen=True)
class Sobolev:
    """``||J^s f||_2`` (inhomogeneous) or ``||D^s f||_2`` (homogeneous)."""

    s: float
    homogeneous: bool = False


@dataclass(frozen=True)
class MixedXT:
    """Space-time norm.

    ``t-outer`` is ``L^q_t L^p_x``; ``x-outer`` is ``L^p_x L^q_t``.  When
    ``q_lorentz`` is set the time norm is the Lorentz norm ``L^{q, q_lorentz}_t``
    (``t-outer`` only).
    """

    p_x: float
    q_t: float
    order: Literal["x-outer", "t-outer"] = "t-outer"
    q_lorentz: float | None = None

    def __post_init__(self) -> None:
        _check_exponent("p_x", self.p_x)
        _check_exponent("q_t", self.q_t)
        if self.q_lorentz is not None:
            _check_exponent("q_lorentz", self.q_lorentz)
            if self.order != "t-outer":
                raise UsageError("a Lorentz time exponent requires the t-outer order")
        if self.order not in ("x-outer", "t-outer"):
            raise UsageError(f"order must be 'x-outer' or 't-outer', got {self.order!r}")


@dataclass(frozen=True)
class AnisotropicYX:
    """``L^{p_y}`` over the transverse axes of ``L^{p_x}`` along axis 0."""

    p_y: float
    p_x: float

    def __post_init__(self) -> None:
        _check_exponent("p_y", self.p_y)
        _check_exponent("p_x", self.p_x)


NormSpec = Union[Lebesgue, Lorentz, Sobolev, MixedXT, AnisotropicYX]


def conjugate(p: float) -> float:
    """Hölder conjugate ``p'`` with ``1/p + 1/p' = 1``."""
    p = _check_exponent("p", p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def lp_sum(values: np.ndarray, weights: np.ndarray | float, p: float, axis: int | tuple[int, ...] | None = None) -> np.ndarray | float:
    """Weighted ``(sum w |v|^p)^{1/p}`` (``max |v|`` for ``p = inf``)."""
    a = np.abs(values)
    if math.isinf(p):
        return np.max(a, axis=axis)
    if p == 1.0:
        return np.sum(a * weights, axis=axis)
    if p == 2.0:
        return np.sqrt(np.sum(a * a * weights, axis=axis))
    return np.sum(a**p * weights, axis=axis) ** (1.0 / p)


def lorentz_norm(values: np.ndarray, weights: np.ndarray | float, p: float, q: float) -> float:
    """Lorentz quasinorm of a step function.

    ``values[j]`` is taken on a set of measure ``weights[j]``.  With the
    decreasing rearrangement ``a_1 >= a_2 >= ...`` and cumulative measures
    ``W_j``, the layer-cake integral ``p ||lambda mu(lambda)^{1/p}||^q_{L^q(dlambda/lambda)}``
    is evaluated exactly:

        ||f||^q = (p/q) * sum_j W_j^{q/p} (a_j^q - a_{j+1}^q),   a_{N+1} = 0,

    and ``||f|| = max_j a_j W_j^{1/p}`` for ``q = inf``.
    """
    p = _check_exponent("p", p)
    q = _check_exponent("q", q)
    a = np.abs(np.asarray(values, dtype=float)).ravel()
    w = np.broadcast_to(np.asarray(weights, dtype=float), np.shape(values)).ravel()
    if a.size == 0:
        return 0.0
    order = np.argsort(-a, kind="stable")
    a = a[order]
    W = np.cumsum(w[order])
    if math.isinf(p):
        top = float(a[0])
        if math.isinf(q) or top == 0.0:
            return top
        return math.inf
    if math.isinf(q):
        return float(np.max(a * W ** (1.0 / p)))
    a_next = np.append(a[1:], 0.0)
    layers = a**q - a_next**q
    total = (p / q) * float(np.sum(W ** (q / p) * layers))
    return total ** (1.0 / q)


def _sobolev(f: Field, s: float, homogeneous: bool) -> float:
    spec = f.spectral().data
    r2 = f.grid.xi_modulus() ** 2
    if homogeneous:
        if s < 0 and abs(spec[(0,) * f.grid.d]) > 1e-12 * float(np.max(np.abs(spec))):
            raise SingularityError("negative-order homogeneous Sobolev norm of a field with nonzero mean")
        safe = np.where(r2 > 0, r2, 1.0)
        weight = np.where(r2 > 0, safe**s, 1.0 if s == 0 else 0.0)
    else:
        weight = (1.0 + r2) ** s
    return math.sqrt(float(np.sum(weight * np.abs(spec) ** 2)) * f.grid.spectral_cell)


def anisotropic(values: np.ndarray, dx: tuple[float, ...], p_y: float, p_x: float) -> float:
    inner = lp_sum(values, dx[0], p_x, axis=0)
    if values.ndim == 1:
        return float(inner)
    return float(lp_sum(inner, float(np.prod(dx[1:])), p_y))


def norm(f: Field, spec: NormSpec) -> float:
    """Evaluate a spatial norm of ``f``."""
    if isinstance(spec, Sobolev):
        return _sobolev(f, spec.s, spec.homogeneous)
    if isinstance(spec, MixedXT):
        raise UsageError("space-time norms need a trajectory; use mixed_norm")
    if f.rep != "physical":
        f = f.physical()
    if isinstance(spec, Lebesgue):
        return float(lp_sum(f.data, f.grid.cell, spec.p))
    if isinstance(spec, Lorentz):
        return lorentz_norm(f.data, f.grid.cell, spec.p, spec.q)
    if isinstance(spec, AnisotropicYX):
        return anisotropic(f.data, f.grid.dx, spec.p_y, spec.p_x)
    raise UsageError(f"unsupported norm specification {spec!r}")


# ---------------------------------------------------------------------------
# Space-time norms
# ---------------------------------------------------------------------------


def trapezoid_weights(times: np.ndarray) -> np.ndarray:
    """Per-sample weights of the composite trapezoid rule on arbitrary nodes."""
    t = np.asarray(times, dtype=float)
    if t.size < 2:
        return np.zeros_like(t)
    gaps = np.diff(t)
    w = np.zeros_like(t)
    w[:-1] += 0.5 * gaps
    w[1:] += 0.5 * gaps
    return w


def window_indices(times: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    t0, t1 = window
    tol = 1e-12 * max(1.0, abs(t1))
    return np.nonzero((times >= t0 - tol) & (times <= t1 + tol))[0]


def time_slices(
    traj: Trajectory,
    window: tuple[float, float] | None = None,
    operator: Multiplier | None = None,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Stored snapshot times and (optionally filtered) physical samples in ``window``."""
    if window is None:
        window = (float(traj.times[0]), traj.valid_until)
    t0, t1 = float(window[0]), float(window[1])
    if t1 <= t0:
        raise UsageError(f"empty time window {window!r}")
    if traj.wrap_time is not None and t1 > traj.wrap_time * (1 + 1e-12):
        raise UsageError(f"time window ends at {t1:g}, after the wraparound time {traj.wrap_time:g}")
    wanted = traj.times[window_indices(traj.times, (t0, t1))]
    have = traj.stored_times[window_indices(traj.stored_times, (t0, t1))]
    if wanted.size < 2 or wanted.size != have.size:
        raise UsageError("the trajectory does not carry full fields at every snapshot in the window")
    slices = []
    for t in have:
        u = traj.field_at(float(t))
        if operator is not None:
            u = apply_multiplier(u, operator)
            data = u.data if u.real else np.abs(u.data)
        else:
            data = u.data
        slices.append(data)
    return have, slices


def mixed_norm(
    traj: Trajectory,
    spec: MixedXT,
    window: tuple[float, float] | None = None,
    operator: Multiplier | None = None,
) -> float:
    """Space-time norm over snapshot samples with trapezoid weights in time.

    ``operator`` (for example a fractional derivative) is applied to every
    snapshot first.  The window must end before the trajectory's wrap time.
    """
    if not isinstance(spec, MixedXT):
        raise UsageError("mixed_norm expects a MixedXT specification")
    times, slices = time_slices(traj, window, operator)
    w = trapezoid_weights(times)
    cell = traj.grid.cell
    if spec.order == "t-outer":
        inner = np.array([float(lp_sum(u, cell, spec.p_x)) for u in slices])
        if spec.q_lorentz is not None:
            return lorentz_norm(inner, w, spec.q_t, spec.q_lorentz)
        return float(lp_sum(inner, w, spec.q_t))
    stack = np.abs(np.stack(slices))
    inner_x = lp_sum(stack, w.reshape((-1,) + (1,) * traj.grid.d), spec.q_t, axis=0)
    return float(lp_sum(inner_x, cell, spec.p_x))


__all__ = [
    "Lebesgue",
    "Lorentz",
    "Sobolev",
    "MixedXT",
    "AnisotropicYX",
    "NormSpec",
    "conjugate",
    "lp_sum",
    "lorentz_norm",
    "anisotropic",
    "norm",
    "trapezoid_weights",
    "window_indices",
    "time_slices",
    "mixed_norm",
]
