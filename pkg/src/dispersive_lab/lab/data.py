"""Initial-data families and amplitude calibration."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..analysis.norms import Lebesgue, Sobolev, norm
from ..errors import ConfigurationError
from ..spectral import Field, Grid, inverse_array
from .config import DataConfig


def _centre(grid: Grid, fraction: float) -> list[float]:
    return [fraction * grid.L[0]] + [0.0] * (grid.d - 1)


def gaussian_profile(grid: Grid, width: float, centre: list[float]) -> np.ndarray:
    r2 = np.zeros(grid.shape)
    for x, c in zip(grid.x_mesh(), centre):
        r2 = r2 + (x - c) ** 2
    return np.exp(-0.5 * r2 / width**2)


def flat_spectrum_profile(grid: Grid, radius: float, order: int, centre: list[float]) -> np.ndarray:
    """Real field whose spectrum is ``exp(-(|xi|/radius)^order)``, translated to ``centre``."""
    xi = grid.xi_mesh()
    modulus = grid.xi_modulus()
    spectrum = np.exp(-((modulus / radius) ** order)).astype(complex)
    for k, c in zip(xi, centre):
        spectrum = spectrum * np.exp(-1j * k * c)
    values = inverse_array(grid, spectrum).real
    return values / float(np.max(np.abs(values)))


def wave_packet_profile(grid: Grid, width: float, frequency: float, centre: list[float]) -> np.ndarray:
    env = gaussian_profile(grid, width, centre)
    return env * np.cos(frequency * (grid.x_mesh()[0] - centre[0]))


def random_sobolev_profile(grid: Grid, sigma: float, width: float, centre: list[float], seed: int) -> np.ndarray:
    """Random-phase field with spectral decay ``(1+|xi|^2)^{-sigma/2}``, localised by a Gaussian of ``width``."""
    rng = np.random.default_rng(seed)
    r2 = grid.xi_modulus() ** 2
    cutoff = 0.25 * min(math.pi / h for h in grid.dx)
    amp = (1.0 + r2) ** (-0.5 * sigma) * np.exp(-r2 / cutoff**2)
    noise = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    values = inverse_array(grid, amp * noise).real * gaussian_profile(grid, width, centre)
    return values / float(np.max(np.abs(values)))


def profile(grid: Grid, cfg: DataConfig, seed: int = 0) -> np.ndarray:
    """Unit-peak profile of the configured family (before calibration)."""
    centre = _centre(grid, cfg.center)
    if cfg.kind == "gaussian":
        return gaussian_profile(grid, cfg.width, centre)
    if cfg.kind == "flat_spectrum":
        return flat_spectrum_profile(grid, cfg.radius, cfg.order, centre)
    if cfg.kind == "wave_packet":
        return wave_packet_profile(grid, cfg.width, cfg.frequency, centre)
    if cfg.kind == "random_sobolev":
        return random_sobolev_profile(grid, cfg.sigma, 8.0 * cfg.width, centre, seed)
    raise ConfigurationError(f"unknown data kind {cfg.kind!r}")


_CALIBRATORS: dict[str, Callable[[Field], float]] = {
    "Hhalf": lambda f: norm(f, Sobolev(0.5)),
    "H1": lambda f: norm(f, Sobolev(1.0)),
    "L2": lambda f: norm(f, Lebesgue(2.0)),
    "L1": lambda f: norm(f, Lebesgue(1.0)),
    "Linf": lambda f: norm(f, Lebesgue(math.inf)),
}


def calibration_factor(grid: Grid, cfg: DataConfig, seed: int = 0, epsilon: float | None = None) -> float:
    """Factor turning the unit-peak profile into data whose ``cfg.calibrate`` norm is ``epsilon``."""
    eps = cfg.epsilon if epsilon is None else float(epsilon)
    if not eps > 0:
        raise ConfigurationError("degenerate initial data: epsilon must be > 0")
    if cfg.calibrate == "none":
        return eps
    size = _CALIBRATORS[cfg.calibrate](Field(grid, profile(grid, cfg, seed)))
    if size == 0:
        raise ConfigurationError("degenerate initial data: profile vanishes on the grid")
    return eps / size


def initial_data(grid: Grid, cfg: DataConfig, seed: int = 0, epsilon: float | None = None) -> Field:
    """Profile scaled so that its ``cfg.calibrate`` norm equals ``epsilon`` (default ``cfg.epsilon``)."""
    factor = calibration_factor(grid, cfg, seed, epsilon)
    return Field(grid, factor * profile(grid, cfg, seed))


def gaussian_function(cfg: DataConfig, grid: Grid) -> Callable[..., np.ndarray]:
    """Closed form of the calibrated Gaussian data, for resampling at rescaled coordinates."""
    if cfg.kind != "gaussian":
        raise ConfigurationError("closed-form resampling is available for gaussian data only")
    amp = calibration_factor(grid, cfg)
    centre = _centre(grid, cfg.center)
    w = cfg.width

    def func(*x: np.ndarray) -> np.ndarray:
        r2 = 0.0
        for xa, c in zip(x, centre):
            r2 = r2 + (xa - c) ** 2
        return amp * np.exp(-0.5 * r2 / w**2)

    return func


__all__ = [
    "gaussian_profile",
    "flat_spectrum_profile",
    "wave_packet_profile",
    "random_sobolev_profile",
    "profile",
    "initial_data",
    "calibration_factor",
    "gaussian_function",
]
