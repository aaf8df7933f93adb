"""Periodic grids, Fourier transforms and Fourier multipliers.

The continuous transform is normalised symmetrically,

    f^(xi) = (2 pi)^(-d/2) * integral f(x) exp(-i x.xi) dx,

so that Plancherel holds with constant one.  On a grid with nodes
``x_j = -L/2 + j dx`` this becomes a scaled FFT followed by the phase
``exp(i xi L/2) = (-1)^m`` for lattice index ``m``.  Discrete L2 sums use
the cell measure ``prod(dx)`` in physical space and ``prod(2 pi / L)`` in
frequency space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, NumericError, SingularityError, UsageError

Rep = Literal["physical", "spectral"]
Family = Literal["airy", "zk"]

DERIVATIVE_KINDS = ("D", "J", "Dx", "laplacian")


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    """Periodic box ``prod_a [-L_a/2, L_a/2)`` sampled with ``n_a`` points per axis.

    Axis 0 is the distinguished ``x`` direction of the dispersion relation;
    the remaining axes are the transverse ``y`` directions.
    """

    n: tuple[int, ...]
    L: tuple[float, ...]

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.n)

    @cached_property
    def dx(self) -> tuple[float, ...]:
        return tuple(length / count for length, count in zip(self.L, self.n))

    @cached_property
    def dxi(self) -> tuple[float, ...]:
        """Wavenumber spacing ``2 pi / L`` per axis."""
        return tuple(2.0 * math.pi / length for length in self.L)

    @property
    def cell(self) -> float:
        """Physical cell measure ``prod(dx)``."""
        return float(np.prod(self.dx))

    @property
    def spectral_cell(self) -> float:
        """Frequency cell measure ``prod(2 pi / L)``."""
        return float(np.prod(self.dxi))

    @property
    def volume(self) -> float:
        return float(np.prod(self.L))

    def index(self, axis: int) -> np.ndarray:
        """Signed integer lattice indices in FFT order (``-n/2`` is the Nyquist index)."""
        n = self.n[axis]
        return np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)

    def x(self, axis: int) -> np.ndarray:
        return -0.5 * self.L[axis] + self.dx[axis] * np.arange(self.n[axis])

    def xi(self, axis: int) -> np.ndarray:
        return self.dxi[axis] * self.index(axis)

    def _sparse(self, vectors: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
        out = []
        for a, v in enumerate(vectors):
            shape = [1] * self.d
            shape[a] = v.size
            out.append(v.reshape(shape))
        return tuple(out)

    def x_mesh(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays, one per axis."""
        return self._sparse([self.x(a) for a in range(self.d)])

    def xi_mesh(self) -> tuple[np.ndarray, ...]:
        """Broadcastable wavenumber arrays, one per axis, in FFT order."""
        return self._sparse([self.xi(a) for a in range(self.d)])

    def index_mesh(self) -> tuple[np.ndarray, ...]:
        return self._sparse([self.index(a) for a in range(self.d)])

    def xi_modulus(self) -> np.ndarray:
        """``|xi|`` on the full lattice."""
        total = np.zeros(self.shape)
        for k in self.xi_mesh():
            total = total + k * k
        return np.sqrt(total)

    def max_wavenumber(self) -> float:
        return math.sqrt(sum((math.pi * n / length) ** 2 for n, length in zip(self.n, self.L)))

    def nyquist_slice(self, axis: int) -> tuple[slice | int, ...]:
        """Index expression selecting the Nyquist hyperplane of ``axis``."""
        sl: list[slice | int] = [slice(None)] * self.d
        sl[axis] = self.n[axis] // 2
        return tuple(sl)

    @cached_property
    def _transform_scale(self) -> float:
        return float(np.prod([h / math.sqrt(2.0 * math.pi) for h in self.dx]))

    @cached_property
    def _phase(self) -> tuple[np.ndarray, ...]:
        # exp(i xi L/2) = (-1)^m on the lattice
        return self._sparse([np.where(self.index(a) % 2 == 0, 1.0, -1.0) for a in range(self.d)])

    def phase(self) -> np.ndarray:
        out = np.ones(self.shape)
        for p in self._phase:
            out = out * p
        return out


def _is_power_of_two(value: int) -> bool:
    return value > 0 and (value & (value - 1)) == 0


def make_grid(d: int, n: int | Sequence[int], L: float | Sequence[float]) -> Grid:
    """Build a validated grid.

    ``n`` and ``L`` may be scalars (shared by all axes) or per-axis sequences.
    """
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= 4:
        raise ConfigurationError(f"grid dimension must be 1..4, got {d!r}")
    counts = [n] * d if np.isscalar(n) else list(n)
    lengths = [L] * d if np.isscalar(L) else list(L)
    if len(counts) != d or len(lengths) != d:
        raise ConfigurationError(f"expected {d} entries for n and L, got n={counts!r}, L={lengths!r}")
    for c in counts:
        if int(c) != c or not _is_power_of_two(int(c)) or int(c) < 8:
            raise ConfigurationError(f"samples per axis must be a power of two >= 8, got {c!r}")
    for length in lengths:
        if not (np.isfinite(length) and length > 0):
            raise ConfigurationError(f"box length must be positive and finite, got {length!r}")
    return Grid(tuple(int(c) for c in counts), tuple(float(v) for v in lengths))


# ---------------------------------------------------------------------------
# Field and transforms
# ---------------------------------------------------------------------------


@dataclass
class Field:
    """A scalar field on ``grid`` held in one of two representations.

    Physical data of a real field is stored as ``float64``; everything else
    is ``complex128``.
    """

    grid: Grid
    data: np.ndarray
    rep: Rep = "physical"
    real: bool = True

    def __post_init__(self) -> None:
        if self.rep not in ("physical", "spectral"):
            raise UsageError(f"unknown representation {self.rep!r}")
        arr = np.asarray(self.data)
        if arr.shape != self.grid.shape:
            raise UsageError(f"data shape {arr.shape} does not match grid shape {self.grid.shape}")
        if self.rep == "physical" and self.real:
            if np.iscomplexobj(arr):
                arr = arr.real
            arr = np.ascontiguousarray(arr, dtype=np.float64)
        else:
            arr = np.ascontiguousarray(arr, dtype=np.complex128)
        self.data = arr

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[..., np.ndarray]) -> "Field":
        """Sample ``func(x0, x1, ...)`` on the grid nodes."""
        values = np.broadcast_to(np.asarray(func(*grid.x_mesh())), grid.shape)
        return cls(grid, np.array(values), "physical", not np.iscomplexobj(values))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape), "physical", True)

    def physical(self) -> "Field":
        return self if self.rep == "physical" else transform(self, "inverse")

    def spectral(self) -> "Field":
        return self if self.rep == "spectral" else transform(self, "forward")

    def values(self) -> np.ndarray:
        """Physical samples (transforming if necessary)."""
        return self.physical().data

    def copy(self) -> "Field":
        return Field(self.grid, self.data.copy(), self.rep, self.real)


def forward_array(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Continuum-normalised spectrum of physical samples."""
    spec = sfft.fftn(values, axes=tuple(range(grid.d)))
    spec *= grid._transform_scale
    for p in grid._phase:
        spec *= p
    return spec


def inverse_array(grid: Grid, spec: np.ndarray) -> np.ndarray:
    work = np.array(spec, dtype=np.complex128, copy=True)
    for p in grid._phase:
        work *= p
    work /= grid._transform_scale
    return sfft.ifftn(work, axes=tuple(range(grid.d)), overwrite_x=True)


def transform(f: Field, direction: Literal["forward", "inverse"]) -> Field:
    """Move a field between physical and spectral representation."""
    if direction == "forward":
        if f.rep != "physical":
            raise UsageError("forward transform expects a physical-rep field")
        return Field(f.grid, forward_array(f.grid, f.data), "spectral", f.real)
    if direction == "inverse":
        if f.rep != "spectral":
            raise UsageError("inverse transform expects a spectral-rep field")
        values = inverse_array(f.grid, f.data)
        return Field(f.grid, values.real if f.real else values, "physical", f.real)
    raise UsageError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def reflect(arr: np.ndarray) -> np.ndarray:
    """Return ``a(-m)`` for a lattice array ``a(m)`` stored in FFT order."""
    out = arr
    for axis in range(arr.ndim):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


def conjugate_symmetry_defect(spec: np.ndarray) -> float:
    """``max|a(-m) - conj(a(m))|`` relative to ``max|a|`` (0 for an all-zero array)."""
    scale = float(np.max(np.abs(spec))) if spec.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(reflect(spec) - np.conj(spec)))) / scale


def l2_physical(f: Field) -> float:
    return float(math.sqrt(np.sum(np.abs(f.values()) ** 2) * f.grid.cell))


def l2_spectral(f: Field) -> float:
    return float(math.sqrt(np.sum(np.abs(f.spectral().data) ** 2) * f.grid.spectral_cell))


# ---------------------------------------------------------------------------
# Multipliers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Multiplier:
    """Fourier multiplier with symbol ``m(xi_0, ..., xi_{d-1})``.

    ``nyquist_axes`` lists axes whose Nyquist hyperplane is overwritten with
    ``nyquist_value`` at evaluation time; odd symbols use this so that real
    fields stay real.  Products of multipliers keep their factors and are
    evaluated factor by factor.
    """

    symbol: Callable[..., np.ndarray] | None
    label: str = "multiplier"
    nyquist_axes: tuple[int, ...] = ()
    nyquist_value: complex = 0.0
    factors: tuple["Multiplier", ...] = field(default=(), repr=False)

    def __call__(self, *xi: np.ndarray) -> np.ndarray:
        if self.factors:
            out = np.asarray(1.0 + 0.0j)
            for fac in self.factors:
                out = out * fac(*xi)
            return out
        assert self.symbol is not None
        return np.asarray(self.symbol(*xi))

    def evaluate(self, grid: Grid) -> np.ndarray:
        """Symbol on the full wavenumber lattice of ``grid`` (complex array)."""
        if self.factors:
            out = np.ones(grid.shape, dtype=np.complex128)
            for fac in self.factors:
                out *= fac.evaluate(grid)
            return out
        with np.errstate(all="ignore"):
            raw = self(*grid.xi_mesh())
        values = np.array(np.broadcast_to(raw, grid.shape), dtype=np.complex128)
        for axis in self.nyquist_axes:
            if axis < grid.d:
                values[grid.nyquist_slice(axis)] = self.nyquist_value
        return values

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        if not isinstance(other, Multiplier):
            return NotImplemented
        parts = (self.factors or (self,)) + (other.factors or (other,))
        return Multiplier(None, f"{self.label}*{other.label}", factors=parts)


def identity_multiplier() -> Multiplier:
    return Multiplier(lambda *xi: np.ones(()), "1")


def _modulus(xi: Sequence[np.ndarray]) -> np.ndarray:
    total = 0.0
    for k in xi:
        total = total + k * k
    return np.sqrt(total)


def _power_with_zero(r: np.ndarray, s: float) -> np.ndarray:
    """``r**s`` with the value at ``r == 0`` defined as 0 (or 1 when ``s == 0``)."""
    if s == 0:
        return np.ones_like(r, dtype=float)
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, safe**s, 0.0)


def derivative_multiplier(s: float, kind: str = "D") -> Multiplier:
    """Symbol of ``D^s`` (``|xi|^s``), ``J^s``, ``D_x^s`` (``|xi_0|^s``) or ``(-Delta)^{s/2}``."""
    if not np.isfinite(s):
        raise UsageError(f"derivative order must be finite, got {s!r}")
    s = float(s)
    if kind in ("D", "laplacian"):
        return Multiplier(lambda *xi: _power_with_zero(_modulus(xi), s), f"{kind}^{s:g}")
    if kind == "J":
        return Multiplier(lambda *xi: (1.0 + _modulus(xi) ** 2) ** (0.5 * s), f"J^{s:g}")
    if kind == "Dx":
        return Multiplier(lambda *xi: _power_with_zero(np.abs(xi[0]), s), f"Dx^{s:g}")
    raise UsageError(f"unknown derivative kind {kind!r}; expected one of {DERIVATIVE_KINDS}")


def partial_multiplier(axis: int) -> Multiplier:
    """``i xi_axis`` with the Nyquist plane of that axis zeroed."""
    return Multiplier(lambda *xi: 1j * xi[axis], f"d/dx{axis}", nyquist_axes=(axis,))


def apply_multiplier(f: Field, m: Multiplier) -> Field:
    """Multiply the spectrum of ``f`` by ``m``; the result has the same rep as ``f``."""
    spec = f.spectral()
    sym = m.evaluate(f.grid)
    bad = ~np.isfinite(sym)
    if bad.any():
        where = tuple(int(i) for i in np.argwhere(bad)[0])
        xi = tuple(float(f.grid.xi(a)[i]) for a, i in enumerate(where))
        raise NumericError(f"symbol {m.label!r} is not finite at xi={xi}")
    real = f.real and conjugate_symmetry_defect(sym) <= 1e-12
    out = Field(f.grid, spec.data * sym, "spectral", real)
    return out if f.rep == "spectral" else transform(out, "inverse")


def fractional_derivative(f: Field, s: float, kind: str = "D") -> Field:
    """Apply ``D^s``, ``J^s``, ``D_x^s`` or ``(-Delta)^{s/2}`` to ``f``.

    For homogeneous kinds with ``s < 0`` the image of the zero set of the
    symbol is defined as 0; the field must carry (numerically) no mass there.
    """
    m = derivative_multiplier(s, kind)
    if s < 0 and kind != "J":
        spec = f.spectral().data
        sup = float(np.max(np.abs(spec))) if spec.size else 0.0
        if kind == "Dx":
            zero_set = np.abs(spec[0, ...]) if f.grid.d > 1 else np.abs(spec[:1])
        else:
            zero_set = np.abs(spec[(0,) * f.grid.d])
        if np.max(zero_set, initial=0.0) > 1e-12 * sup:
            raise SingularityError(
                f"{m.label} of a field with nonzero mass on the zero set of the symbol"
            )
    return apply_multiplier(f, m)


# ---------------------------------------------------------------------------
# Littlewood-Paley decomposition
# ---------------------------------------------------------------------------


def _mollifier_tail(x: np.ndarray) -> np.ndarray:
    xs = np.where(x > 0, x, 1.0)
    return np.where(x > 0, np.exp(-1.0 / xs), 0.0)


def smooth_step(x: np.ndarray | float) -> np.ndarray:
    """C-infinity step: 0 for ``x <= 0``, 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    a = _mollifier_tail(x)
    b = _mollifier_tail(1.0 - x)
    return a / (a + b)


def lp_low(r: np.ndarray | float) -> np.ndarray:
    """Low-frequency cutoff: 1 on ``[0, 1]``, 0 on ``[2, inf)``."""
    return 1.0 - smooth_step(np.asarray(r, dtype=float) - 1.0)


def lp_bump(r: np.ndarray | float) -> np.ndarray:
    """Annular bump ``lp_low(r) - lp_low(2r)``, supported in ``[1/2, 2]``."""
    r = np.asarray(r, dtype=float)
    return lp_low(r) - lp_low(2.0 * r)


def _check_dyadic(N: float) -> int:
    if not np.isfinite(N) or N < 1 or int(N) != N or not _is_power_of_two(int(N)):
        raise UsageError(f"Littlewood-Paley frequency must be 1 or a power of two, got {N!r}")
    return int(N)


def lp_multiplier(N: float) -> Multiplier:
    N = _check_dyadic(N)
    if N == 1:
        return Multiplier(lambda *xi: lp_low(_modulus(xi)), "P_1")
    return Multiplier(lambda *xi: lp_bump(_modulus(xi) / N), f"P_{N}")


def dyadic_frequencies(grid: Grid) -> list[int]:
    """Dyadic ``N`` whose blocks can meet the lattice: ``1, 2, ..., 2^J`` with ``2^J >= max|xi|``."""
    top = grid.max_wavenumber()
    out = [1]
    while out[-1] < top:
        out.append(out[-1] * 2)
    return out


def littlewood_paley(f: Field, N: float) -> Field:
    return apply_multiplier(f, lp_multiplier(N))


# ---------------------------------------------------------------------------
# Linear propagators and dealiasing
# ---------------------------------------------------------------------------


def dispersion_phase(family: str, xi: Sequence[np.ndarray]) -> np.ndarray:
    """Phase rate ``phi`` with ``U(t) = exp(i t phi(xi))``."""
    # products rather than powers keep phi exactly odd on the lattice
    if family == "airy":
        return xi[0] * xi[0] * xi[0]
    if family == "zk":
        total = 0.0
        for k in xi:
            total = total + k * k
        return xi[0] * total
    raise UsageError(f"unknown dispersion family {family!r}")


def check_family(family: str, d: int) -> None:
    if family == "airy":
        if d != 1:
            raise UsageError(f"the airy family lives in one dimension, grid has d={d}")
    elif family == "zk":
        if d < 2:
            raise UsageError(f"the zk family needs d >= 2, grid has d={d}")
    else:
        raise UsageError(f"unknown dispersion family {family!r}")


def propagator_multiplier(t: float, family: str) -> Multiplier:
    """``exp(i t phi(xi))``; the phase is switched off on the x-Nyquist plane."""
    if not np.isfinite(t):
        raise UsageError(f"propagation time must be finite, got {t!r}")
    t = float(t)
    return Multiplier(
        lambda *xi: np.exp(1j * t * dispersion_phase(family, xi)),
        f"U_{family}({t:g})",
        nyquist_axes=(0,),
        nyquist_value=1.0,
    )


def linear_propagator(f: Field, t: float, family: str) -> Field:
    check_family(family, f.grid.d)
    return apply_multiplier(f, propagator_multiplier(t, family))


def band_limit(grid: Grid, degree: int) -> tuple[int, ...]:
    """Largest retained ``|index|`` per axis for products of the given degree.

    ``K = (n - 1) // (degree + 1)`` guarantees ``(degree + 1) K < n``, so no
    alias of a degree-``m`` product of retained modes lands on a retained mode.
    """
    if degree < 2:
        raise UsageError(f"dealiasing degree must be >= 2, got {degree!r}")
    return tuple((n - 1) // (degree + 1) for n in grid.n)


def dealias_mask(grid: Grid, degree: int) -> Multiplier:
    """0/1 multiplier keeping ``|index_a| <= band_limit`` on every axis."""
    limits = band_limit(grid, degree)
    dxi = grid.dxi

    def symbol(*xi: np.ndarray) -> np.ndarray:
        keep = np.ones((), dtype=bool)
        for k, h, K in zip(xi, dxi, limits):
            keep = keep & (np.abs(np.rint(k / h)) <= K)
        return keep.astype(float)

    return Multiplier(symbol, f"dealias(m={degree})")


def dealias(f: Field, degree: int) -> Field:
    return apply_multiplier(f, dealias_mask(f.grid, degree))


__all__ = [
    "Grid",
    "Field",
    "Multiplier",
    "make_grid",
    "transform",
    "forward_array",
    "inverse_array",
    "reflect",
    "conjugate_symmetry_defect",
    "l2_physical",
    "l2_spectral",
    "identity_multiplier",
    "derivative_multiplier",
    "partial_multiplier",
    "apply_multiplier",
    "fractional_derivative",
    "smooth_step",
    "lp_low",
    "lp_bump",
    "lp_multiplier",
    "dyadic_frequencies",
    "littlewood_paley",
    "dispersion_phase",
    "check_family",
    "propagator_multiplier",
    "linear_propagator",
    "band_limit",
    "dealias_mask",
    "dealias",
]
