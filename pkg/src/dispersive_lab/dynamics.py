"""Time evolution of gKdV / gZK by an integrating-factor Runge-Kutta scheme.

The equation is written as

    u_t = -L u + c * d/dx (u^{k+1}),      L = d^3/dx^3 (airy) or d/dx Delta (zk),

with ``c = -1`` in the focusing case and ``c = +1`` in the defocusing case.
The linear part is integrated exactly through ``U(t) = exp(i t phi(xi))``;
classical RK4 acts on ``v = U(-t) u``.  Internally the state is kept as the
raw real-to-complex FFT of the physical samples, which the multipliers act
on without any normalisation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Literal, Sequence

import numpy as np
import scipy.fft as sfft

from .errors import BlowUpError, ConfigurationError, UsageError
from .spectral import Field, Grid, band_limit, check_family, dispersion_phase

log = logging.getLogger(__name__)

Sign = Literal["focusing", "defocusing"]


@dataclass(frozen=True)
class EquationSpec:
    """Dispersion family, dimension, nonlinearity power and sign.

    ``coupling`` scales the nonlinear term; ``coupling=0`` gives the linear flow.
    """

    family: str
    d: int
    k: int
    sign: Sign = "focusing"
    coupling: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in ("airy", "zk"):
            raise ConfigurationError(f"family must be 'airy' or 'zk', got {self.family!r}")
        if self.family == "airy" and self.d != 1:
            raise ConfigurationError("the airy family requires d = 1")
        if self.family == "zk" and not 2 <= self.d <= 4:
            raise ConfigurationError("the zk family requires 2 <= d <= 4")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ConfigurationError(f"nonlinearity power k must be an integer >= 1, got {self.k!r}")
        if self.sign not in ("focusing", "defocusing"):
            raise ConfigurationError(f"sign must be 'focusing' or 'defocusing', got {self.sign!r}")
        if not math.isfinite(self.coupling):
            raise ConfigurationError("coupling must be finite")

    @property
    def s_c(self) -> Fraction:
        """Scaling-critical Sobolev exponent ``d/2 - 2/k``."""
        return Fraction(self.d, 2) - Fraction(2, int(self.k))

    @property
    def nonlinear_coefficient(self) -> float:
        """``c`` in ``u_t = -L u + c (u^{k+1})_x``."""
        return (1.0 if self.sign == "defocusing" else -1.0) * self.coupling

    @property
    def potential_sign(self) -> float:
        """Sign in front of ``(1/(k+2)) int u^{k+2}`` in the energy."""
        return 1.0 if self.sign == "defocusing" else -1.0

    def linear(self) -> "EquationSpec":
        return EquationSpec(self.family, self.d, self.k, self.sign, 0.0)


# ---------------------------------------------------------------------------
# Solver kernels on the half spectrum
# ---------------------------------------------------------------------------


class HalfSpectrumSolver:
    """Precomputed symbols for one ``(grid, spec)`` pair.

    The last axis is stored as a half spectrum (``rfftn`` layout).  Instances
    are cheap to share read-only; the exponential cache is private.
    """

    def __init__(self, grid: Grid, spec: EquationSpec) -> None:
        check_family(spec.family, grid.d)
        if spec.d != grid.d:
            raise UsageError(f"equation dimension {spec.d} does not match grid dimension {grid.d}")
        self.grid = grid
        self.spec = spec
        self.axes = tuple(range(grid.d))
        d = grid.d
        idx = []
        for a in range(d):
            n = grid.n[a]
            if a == d - 1:
                i = np.arange(n // 2 + 1)
            else:
                i = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
            shape = [1] * d
            shape[a] = i.size
            idx.append(i.reshape(shape))
        self.index = tuple(idx)
        self.xi = tuple(grid.dxi[a] * idx[a] for a in range(d))
        self.nyquist = tuple(np.abs(idx[a]) == grid.n[a] // 2 for a in range(d))
        self.half_shape = tuple(grid.n[:-1]) + (grid.n[-1] // 2 + 1,)

        phi = dispersion_phase(spec.family, self.xi)
        self.phi = np.where(self.nyquist[0], 0.0, np.broadcast_to(phi, self.half_shape))
        ddx = np.where(self.nyquist[0], 0.0, 1j * self.xi[0])
        limits = band_limit(grid, spec.k + 1)
        keep = np.ones((), dtype=bool)
        for a in range(d):
            keep = keep & (np.abs(idx[a]) <= limits[a])
        self.mask = np.broadcast_to(keep, self.half_shape).astype(float)
        self.nl_symbol = spec.nonlinear_coefficient * ddx * self.mask

        grad2 = np.zeros(self.half_shape)
        for a in range(d):
            grad2 = grad2 + np.where(self.nyquist[a], 0.0, self.xi[a] ** 2)
        self.grad2 = grad2
        w = np.full(grid.n[-1] // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        shape = [1] * d
        shape[-1] = w.size
        self.half_weight = w.reshape(shape)
        self.points = int(np.prod(grid.n))
        self._exp_cache: dict[float, np.ndarray] = {}

    # transforms ---------------------------------------------------------
    def to_half(self, u: np.ndarray) -> np.ndarray:
        return sfft.rfftn(u, axes=self.axes)

    def to_physical(self, uh: np.ndarray) -> np.ndarray:
        return sfft.irfftn(uh, s=self.grid.shape, axes=self.axes)

    def propagator(self, t: float) -> np.ndarray:
        key = float(t)
        out = self._exp_cache.get(key)
        if out is None:
            out = np.exp(1j * key * self.phi)
            if len(self._exp_cache) > 8:
                self._exp_cache.clear()
            self._exp_cache[key] = out
        return out

    # right-hand side ------------------------------------------------------
    def nonlinear(self, uh: np.ndarray, t: float = 0.0) -> np.ndarray:
        if self.spec.coupling == 0.0:
            return np.zeros_like(uh)
        u = self.to_physical(uh * self.mask)
        with np.errstate(over="ignore", invalid="ignore"):
            p = u ** (self.spec.k + 1)
            total = float(np.sum(p))
        if not math.isfinite(total):
            with np.errstate(invalid="ignore"):
                finite = u[np.isfinite(u)]
            sup = float(np.max(np.abs(finite))) if finite.size else math.inf
            raise BlowUpError(t, sup)
        return self.nl_symbol * self.to_half(p)

    def step(self, uh: np.ndarray, h: float, t: float = 0.0) -> np.ndarray:
        """One integrating-factor RK4 step of size ``h`` (may be negative)."""
        e_half = self.propagator(0.5 * h)
        e_full = self.propagator(h)
        if self.spec.coupling == 0.0:
            return e_full * uh
        k1 = self.nonlinear(uh, t)
        a = e_half * uh
        k2 = self.nonlinear(a + (0.5 * h) * (e_half * k1), t + 0.5 * h)
        k3 = self.nonlinear(a + (0.5 * h) * k2, t + 0.5 * h)
        k4 = self.nonlinear(e_full * uh + h * (e_half * k3), t + h)
        out = e_full * (uh + (h / 6.0) * k1)
        out += (h / 3.0) * (e_half * (k2 + k3))
        out += (h / 6.0) * k4
        return out

    # diagnostics -----------------------------------------------------------
    def spectral_sum(self, uh: np.ndarray, weight: np.ndarray | float = 1.0) -> float:
        """Continuum integral ``int w(xi) |u^(xi)|^2 dxi`` from a raw half spectrum."""
        with np.errstate(over="ignore", invalid="ignore"):
            s = float(np.sum(self.half_weight * weight * (uh.real**2 + uh.imag**2)))
        return s * self.grid.cell / self.points

    def energy(self, u: np.ndarray, uh: np.ndarray) -> float:
        kinetic = 0.5 * self.spectral_sum(uh, self.grad2)
        k = self.spec.k
        with np.errstate(over="ignore", invalid="ignore"):
            potential = float(np.sum(u ** (k + 2))) * self.grid.cell / (k + 2)
        return kinetic + self.spec.potential_sign * potential

    def mass(self, u: np.ndarray) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            return float(np.sum(u * u)) * self.grid.cell


@lru_cache(maxsize=8)
def solver_for(grid: Grid, spec: EquationSpec) -> HalfSpectrumSolver:
    return HalfSpectrumSolver(grid, spec)


def _require_real_physical(u: Field) -> np.ndarray:
    if u.rep != "physical":
        raise UsageError("expected a physical-rep field")
    if not u.real:
        raise UsageError("expected a real field")
    return u.data


def nonlinearity(u: Field, spec: EquationSpec, t: float = 0.0) -> Field:
    """``c (P[(P u)^{k+1}])_x`` in physical rep, with ``P`` the dealias projector."""
    values = _require_real_physical(u)
    solver = solver_for(u.grid, spec)
    out = solver.nonlinear(solver.to_half(values), t)
    return Field(u.grid, solver.to_physical(out), "physical", True)


def step(u: Field, t: float, dt: float, spec: EquationSpec) -> Field:
    """Advance ``u`` from ``t`` to ``t + dt``.  Negative ``dt`` steps backwards."""
    if not math.isfinite(dt) or dt == 0.0:
        raise UsageError(f"time step must be finite and nonzero, got {dt!r}")
    values = _require_real_physical(u)
    solver = solver_for(u.grid, spec)
    uh = solver.step(solver.to_half(values), dt, t)
    return Field(u.grid, solver.to_physical(uh), "physical", True)


def conserved(u: Field, spec: EquationSpec) -> tuple[float, float]:
    """Mass ``int u^2`` and energy ``1/2 int |grad u|^2 -+ 1/(k+2) int u^{k+2}``."""
    values = _require_real_physical(u)
    solver = solver_for(u.grid, spec)
    uh = solver.to_half(values)
    return solver.mass(values), solver.energy(values, uh)


# ---------------------------------------------------------------------------
# Wraparound guard
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _buffer_weights(n: int, length: float, fraction: float) -> np.ndarray:
    # cell j is [x_j, x_j + dx); weight = overlap with the two outer slabs / dx
    dx = length / n
    left = -0.5 * length + dx * np.arange(n)
    right = left + dx
    width = fraction * length
    lo_end = -0.5 * length + width
    hi_start = 0.5 * length - width
    overlap = np.clip(np.minimum(right, lo_end) - left, 0.0, dx)
    overlap += np.clip(right - np.maximum(left, hi_start), 0.0, dx)
    return np.minimum(overlap / dx, 1.0)


def boundary_fraction(values: np.ndarray, grid: Grid, buffer_fraction: float) -> float:
    weights = _buffer_weights(grid.n[0], grid.L[0], float(buffer_fraction))
    sq = np.abs(values) ** 2
    profile = sq.reshape(grid.n[0], -1).sum(axis=1)
    total = float(profile.sum())
    if total == 0.0:
        return 0.0
    return float(np.dot(weights, profile)) / total


def wraparound_guard(u: Field, buffer_fraction: float = 0.05) -> float:
    """Share of ``int u^2`` lying in the two outer x-slabs of width ``buffer_fraction * L``."""
    if not 0.0 < buffer_fraction < 0.5:
        raise UsageError(f"buffer fraction must lie in (0, 1/2), got {buffer_fraction!r}")
    return boundary_fraction(u.values(), u.grid, buffer_fraction)


# ---------------------------------------------------------------------------
# Snapshot schedules and step-size rule
# ---------------------------------------------------------------------------


def geometric_schedule(T: float, ratio: float = 1.1, start: float = 1.0) -> np.ndarray:
    """``0`` followed by ``start * ratio^j`` up to ``T`` (``T`` itself included)."""
    if T <= 0 or ratio <= 1 or start <= 0:
        raise UsageError("geometric schedule needs T > 0, ratio > 1 and start > 0")
    times = [0.0]
    t = start
    while t < T * (1 - 1e-12):
        times.append(t)
        t *= ratio
    times.append(float(T))
    return np.array(times)


def uniform_schedule(T: float, spacing: float) -> np.ndarray:
    if T <= 0 or spacing <= 0:
        raise UsageError("uniform schedule needs T > 0 and spacing > 0")
    count = int(math.ceil(T / spacing - 1e-9))
    return np.linspace(0.0, T, count + 1)


def hybrid_schedule(T: float, switch: float, spacing: float, ratio: float) -> np.ndarray:
    """Uniform spacing on ``[0, switch]``, geometric afterwards."""
    head = uniform_schedule(min(switch, T), spacing)
    if T <= switch:
        return head
    tail = [head[-1]]
    while tail[-1] * ratio < T * (1 - 1e-12):
        tail.append(tail[-1] * ratio)
    tail.append(float(T))
    return np.concatenate([head, np.array(tail[1:])])


def default_dt(sup: float, grid: Grid, spec: EquationSpec, cfl: float = 0.5) -> float:
    """Advective step rule ``cfl * dx / (max(1, sup)^k (k+1))``."""
    return cfl * min(grid.dx) / (max(1.0, sup) ** spec.k * (spec.k + 1))


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass
class ConservedLedger:
    """Mass and energy samples with running maximal relative drifts."""

    times: list[float] = field(default_factory=list)
    mass: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    max_mass_drift: float = 0.0
    max_energy_drift: float = 0.0

    @staticmethod
    def _drift(q: float, q0: float) -> float:
        if q0 == 0.0:
            return abs(q)
        return abs(q - q0) / abs(q0)

    def record(self, t: float, mass: float, energy: float) -> None:
        if not (math.isfinite(mass) and math.isfinite(energy)):
            raise BlowUpError(t, math.inf, f"non-finite conserved quantity at t={t:.6g}")
        self.times.append(float(t))
        self.mass.append(float(mass))
        self.energy.append(float(energy))
        self.max_mass_drift = max(self.max_mass_drift, self._drift(mass, self.mass[0]))
        self.max_energy_drift = max(self.max_energy_drift, self._drift(energy, self.energy[0]))


NormHook = Callable[[Field], float]


@dataclass
class Trajectory:
    """Snapshots, per-snapshot norm records and the conservation ledger of one run."""

    spec: EquationSpec
    grid: Grid
    times: np.ndarray
    records: dict[str, np.ndarray]
    stored_times: np.ndarray
    stored: list[np.ndarray]
    ledger: ConservedLedger
    wrap_time: float | None = None
    blowup: BlowUpError | None = None
    steps: int = 0
    dt_halvings: int = 0
    drift_violation: bool = False
    buffer_fraction: float = 0.05
    wrap_threshold: float = 1e-6

    def field_at(self, t: float) -> Field:
        i = int(np.argmin(np.abs(self.stored_times - t)))
        if abs(self.stored_times[i] - t) > 1e-12 * max(1.0, abs(t)):
            raise UsageError(f"no stored field at t={t!r}")
        return Field(self.grid, self.stored[i], "physical", True)

    def fields(self) -> list[tuple[float, Field]]:
        return [(float(t), Field(self.grid, u, "physical", True)) for t, u in zip(self.stored_times, self.stored)]

    @property
    def valid_until(self) -> float:
        """End of the validity window: ``wrap_time`` if the guard fired, else the last snapshot."""
        end = float(self.times[-1]) if len(self.times) else 0.0
        return end if self.wrap_time is None else min(end, self.wrap_time)

    @property
    def halted(self) -> bool:
        return self.blowup is not None


class _Recorder:
    """Accumulates per-snapshot records and thinned field storage."""

    def __init__(
        self,
        solver: HalfSpectrumSolver,
        schedule: np.ndarray,
        r_values: Sequence[float],
        hooks: dict[str, NormHook],
        max_stored: int | None,
        buffer_fraction: float,
    ) -> None:
        self.solver = solver
        self.r_values = tuple(r_values)
        self.hooks = hooks
        self.buffer_fraction = buffer_fraction
        n = len(schedule)
        if max_stored is None or n <= max_stored:
            keep = set(range(n))
        else:
            keep = set(int(i) for i in np.unique(np.rint(np.linspace(0, n - 1, max_stored))))
        self.keep = keep
        self.times: list[float] = []
        self.rows: dict[str, list[float]] = {}
        self.stored_times: list[float] = []
        self.stored: list[np.ndarray] = []
        self._hhalf_weight = np.sqrt(1.0 + _modulus2(solver))

    def _put(self, key: str, value: float) -> None:
        self.rows.setdefault(key, []).append(float(value))

    def record(self, index: int, t: float, u: np.ndarray, uh: np.ndarray, mass: float, energy: float) -> None:
        grid = self.solver.grid
        self.times.append(float(t))
        absu = np.abs(u)
        self._put("L2", math.sqrt(mass))
        self._put("Linf", float(absu.max()))
        for r in self.r_values:
            self._put(norm_key(r), lebesgue(absu, grid, r))
        self._put("Hhalf", math.sqrt(self.solver.spectral_sum(uh, self._hhalf_weight)))
        self._put("mass", mass)
        self._put("energy", energy)
        self._put("boundary_mass_fraction", boundary_fraction(u, grid, self.buffer_fraction))
        if self.hooks:
            fld = Field(grid, u, "physical", True)
            for name, hook in self.hooks.items():
                self._put(name, hook(fld))
        if index in self.keep:
            self.stored_times.append(float(t))
            self.stored.append(np.array(u, copy=True))


def _modulus2(solver: HalfSpectrumSolver) -> np.ndarray:
    total = np.zeros(solver.half_shape)
    for k in solver.xi:
        total = total + k * k
    return total


def norm_key(r: float) -> str:
    return "Linf" if math.isinf(r) else f"L{r:g}"


def lebesgue(absu: np.ndarray, grid: Grid, r: float) -> float:
    if math.isinf(r):
        return float(absu.max())
    return float((np.sum(absu**r) * grid.cell) ** (1.0 / r))


def _finish(
    spec: EquationSpec,
    grid: Grid,
    rec: _Recorder,
    ledger: ConservedLedger,
    **extra: object,
) -> Trajectory:
    return Trajectory(
        spec=spec,
        grid=grid,
        times=np.array(rec.times),
        records={k: np.array(v) for k, v in rec.rows.items()},
        stored_times=np.array(rec.stored_times),
        stored=rec.stored,
        ledger=ledger,
        **extra,  # type: ignore[arg-type]
    )


def _check_schedule(schedule: Iterable[float]) -> np.ndarray:
    times = np.asarray(list(schedule), dtype=float)
    if times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
        raise UsageError("snapshot times must be nonnegative and strictly increasing")
    return times


def evolve(
    u0: Field,
    spec: EquationSpec,
    T: float,
    dt: float | None = None,
    schedule: Iterable[float] | None = None,
    *,
    cfl: float = 0.5,
    r_values: Sequence[float] = (),
    hooks: dict[str, NormHook] | None = None,
    wrap_threshold: float = 1e-6,
    buffer_fraction: float = 0.05,
    halt_on_wrap: bool = True,
    drift_tolerance: tuple[float, float] | None = None,
    max_halvings: int = 4,
    max_stored: int | None = 64,
) -> Trajectory:
    """Integrate from ``t = 0`` to ``T`` recording snapshots.

    Parameters
    ----------
    dt:
        Fixed step; ``None`` applies :func:`default_dt` at the start of every
        snapshot interval.  Steps are shrunk so snapshots are hit exactly.
    drift_tolerance:
        ``(mass, energy)`` relative drift bounds.  A violation restarts the run
        with half the step, at most ``max_halvings`` times.
    halt_on_wrap:
        Stop as soon as the boundary mass fraction exceeds ``wrap_threshold``.
        With ``False`` the run continues and ``wrap_time`` only marks the event.
    """
    values = _require_real_physical(u0)
    if not np.all(np.isfinite(values)):
        raise UsageError("initial data must be finite")
    times = _check_schedule(geometric_schedule(T) if schedule is None else schedule)
    if times[-1] > T * (1 + 1e-12):
        raise UsageError("snapshot schedule extends beyond the horizon T")
    if dt is not None and not (math.isfinite(dt) and dt > 0):
        raise UsageError(f"time step must be positive, got {dt!r}")
    solver = solver_for(u0.grid, spec)

    scale = 1.0
    halvings = 0
    while True:
        traj = _run(solver, values, times, dt, cfl, scale, r_values, hooks or {}, wrap_threshold,
                    buffer_fraction, halt_on_wrap, drift_tolerance, max_stored)
        if not traj.drift_violation or halvings >= max_halvings or traj.blowup is not None:
            traj.dt_halvings = halvings
            return traj
        halvings += 1
        scale *= 0.5
        log.info("drift tolerance exceeded; restarting with step scale %g", scale)


def _run(
    solver: HalfSpectrumSolver,
    values: np.ndarray,
    times: np.ndarray,
    dt: float | None,
    cfl: float,
    scale: float,
    r_values: Sequence[float],
    hooks: dict[str, NormHook],
    wrap_threshold: float,
    buffer_fraction: float,
    halt_on_wrap: bool,
    drift_tolerance: tuple[float, float] | None,
    max_stored: int | None,
) -> Trajectory:
    grid, spec = solver.grid, solver.spec
    rec = _Recorder(solver, times, r_values, hooks, max_stored, buffer_fraction)
    ledger = ConservedLedger()
    u = np.array(values, dtype=float)
    uh = solver.to_half(u)
    t = 0.0
    steps = 0
    wrap_time: float | None = None
    blowup: BlowUpError | None = None
    violation = False
    mass, energy = solver.mass(u), solver.energy(u, uh)
    ledger.record(t, mass, energy)

    for i, target in enumerate(times):
        if target > t:
            span = target - t
            base = dt if dt is not None else default_dt(float(np.max(np.abs(u))), grid, spec, cfl)
            count = max(1, int(math.ceil(span / (base * scale) - 1e-9)))
            h = span / count
            try:
                for j in range(count):
                    uh = solver.step(uh, h, t)
                    t = target if j == count - 1 else t + h
                    steps += 1
                    u = solver.to_physical(uh)
                    mass, energy = solver.mass(u), solver.energy(u, uh)
                    ledger.record(t, mass, energy)
                    if drift_tolerance is not None and (
                        ledger.max_mass_drift > drift_tolerance[0] or ledger.max_energy_drift > drift_tolerance[1]
                    ):
                        violation = True
                        break
                    if wrap_time is None and boundary_fraction(u, grid, buffer_fraction) > wrap_threshold:
                        wrap_time = t
                        if halt_on_wrap:
                            break
            except BlowUpError as exc:
                blowup = exc
                log.warning("%s", exc)
                break
            if violation or (halt_on_wrap and wrap_time is not None):
                break
        rec.record(i, target, u, uh, mass, energy)
        if wrap_time is None and boundary_fraction(u, grid, buffer_fraction) > wrap_threshold:
            wrap_time = float(target)
            if halt_on_wrap:
                break

    return _finish(
        spec, grid, rec, ledger,
        wrap_time=wrap_time, blowup=blowup, steps=steps, drift_violation=violation,
        buffer_fraction=buffer_fraction, wrap_threshold=wrap_threshold,
    )


def linear_trajectory(
    u0: Field,
    spec: EquationSpec,
    schedule: Iterable[float],
    *,
    r_values: Sequence[float] = (),
    hooks: dict[str, NormHook] | None = None,
    wrap_threshold: float = 1e-6,
    buffer_fraction: float = 0.05,
    halt_on_wrap: bool = False,
    max_stored: int | None = 64,
) -> Trajectory:
    """Exact linear flow ``U(t) u0`` evaluated at the snapshot times.

    The ledger and the guard are sampled at snapshots only.
    """
    values = _require_real_physical(u0)
    times = _check_schedule(schedule)
    lin = spec.linear()
    solver = solver_for(u0.grid, lin)
    rec = _Recorder(solver, times, r_values, hooks or {}, max_stored, buffer_fraction)
    ledger = ConservedLedger()
    uh0 = solver.to_half(np.asarray(values, dtype=float))
    wrap_time: float | None = None
    for i, t in enumerate(times):
        uh = np.exp(1j * float(t) * solver.phi) * uh0
        u = solver.to_physical(uh)
        mass, energy = solver.mass(u), solver.energy(u, uh)
        ledger.record(float(t), mass, energy)
        rec.record(i, float(t), u, uh, mass, energy)
        if wrap_time is None and boundary_fraction(u, u0.grid, buffer_fraction) > wrap_threshold:
            wrap_time = float(t)
            if halt_on_wrap:
                break
    return _finish(
        lin, u0.grid, rec, ledger,
        wrap_time=wrap_time, buffer_fraction=buffer_fraction, wrap_threshold=wrap_threshold,
    )


__all__ = [
    "EquationSpec",
    "ConservedLedger",
    "Trajectory",
    "HalfSpectrumSolver",
    "solver_for",
    "nonlinearity",
    "step",
    "evolve",
    "linear_trajectory",
    "conserved",
    "wraparound_guard",
    "boundary_fraction",
    "geometric_schedule",
    "uniform_schedule",
    "hybrid_schedule",
    "default_dt",
    "norm_key",
    "lebesgue",
]
