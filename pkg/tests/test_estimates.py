from __future__ import annotations

import math

import numpy as np
import pytest

from dispersive_lab.analysis.estimates import (
    SmoothingPair,
    StrichartzPair,
    dispersive_rate,
    dispersive_ratio,
    kato_smoothing_ratio,
    smoothing_ratio,
    strichartz_ratio,
)
from dispersive_lab.analysis.fitting import decay_fit
from dispersive_lab.analysis.norms import Lebesgue, norm
from dispersive_lab.dynamics import EquationSpec, hybrid_schedule, linear_trajectory
from dispersive_lab.errors import SingularityError, UsageError
from dispersive_lab.lab.data import flat_spectrum_profile
from dispersive_lab.spectral import Field, linear_propagator, make_grid, partial_multiplier, apply_multiplier

KATO = 1 / math.sqrt(3)


def gaussian(grid, width=1.0, centre=0.0):
    return Field.from_function(grid, lambda x: np.exp(-0.5 * ((x - centre) / width) ** 2))


def packet(grid, width=2.0, k0=3.0):
    return Field.from_function(grid, lambda x: np.exp(-0.5 * (x / width) ** 2) * np.cos(k0 * x))


# --- dispersive ---------------------------------------------------------------------


def test_rates():
    assert dispersive_rate("airy", 1, math.inf)[1] == pytest.approx(1 / 3)
    assert dispersive_rate("airy", 1, 4.0)[1] == pytest.approx(1 / 6)
    assert dispersive_rate("zk", 2, 8.0)[1] == pytest.approx(0.5)
    assert dispersive_rate("zk", 3, math.inf)[1] == pytest.approx(1.0)
    with pytest.raises(UsageError):
        dispersive_rate("airy", 1, 1.5)


@pytest.mark.parametrize("t", [0.5, 3.0, 20.0])
def test_l2_ratio_is_one(t):
    g = make_grid(1, 2048, 200.0)
    assert abs(dispersive_ratio(gaussian(g), "airy", t, 2.0) - 1.0) < 1e-12


def test_sup_ratio_levels_off():
    g = make_grid(1, 8192, 400 * math.pi)
    u0 = gaussian(g, centre=0.4 * g.L[0])
    t = np.geomspace(20, 60, 8)
    ratios = [dispersive_ratio(u0, "airy", s, math.inf) for s in t]
    slope = np.polyfit(np.log(t), np.log(ratios), 1)[0]
    assert abs(slope) < 0.05


def test_2d_sup_exponent():
    g = make_grid(2, 512, 64 * math.pi)
    # band-limited data with a flat spectrum, shifted towards +x so the tail has room
    u0 = Field(g, flat_spectrum_profile(g, 2.5, 8, [0.3 * g.L[0], 0.0]))
    t = np.geomspace(2, 12, 8)
    sup = [norm(linear_propagator(u0, s, "zk"), Lebesgue(math.inf)) for s in t]
    assert abs(decay_fit(t, np.array(sup)).exponent + 2 / 3) < 0.05


def test_family_mismatch():
    with pytest.raises(UsageError):
        dispersive_ratio(gaussian(make_grid(1, 64, 10.0)), "zk", 1.0, 4.0)


# --- local smoothing ----------------------------------------------------------------


def fft_route_smoothing(u0, x_star, half, steps):
    """Independent route: FFT propagation, spectral x-derivative, nearest node, trapezoid in t."""
    ts = np.linspace(-half, half, steps)
    j = int(np.argmin(np.abs(u0.grid.x(0) - x_star)))
    d = partial_multiplier(0)
    v = np.array([apply_multiplier(linear_propagator(u0, t, "airy"), d).values()[j] for t in ts])
    l2 = norm(u0, Lebesgue(2.0))
    return math.sqrt(np.trapezoid(v * v, ts)) / l2, g_node(u0.grid, j)


def g_node(grid, j):
    return float(grid.x(0)[j])


def test_kato_constant_and_fft_route():
    g = make_grid(1, 4096, 400 * math.pi)
    u0 = packet(g)
    res = kato_smoothing_ratio(u0, 0.0)
    assert res.warning is None
    assert abs(res.ratio / KATO - 1) < 0.01
    oracle, node = fft_route_smoothing(u0, 0.0, 3.0, 3001)
    assert node == 0.0
    assert abs(oracle / KATO - 1) < 1e-3
    assert abs(res.ratio - oracle) < 1e-3


def test_kato_independent_of_position_and_scale():
    g = make_grid(1, 4096, 400 * math.pi)
    a = kato_smoothing_ratio(packet(g), 0.0).ratio
    b = kato_smoothing_ratio(packet(g), 7.5).ratio
    c = kato_smoothing_ratio(packet(g, width=1.0, k0=6.0), 0.0).ratio
    assert abs(a - b) < 1e-3
    assert abs(c / a - 1) < 0.01


def test_kato_short_window_warns():
    g = make_grid(1, 2048, 200 * math.pi)
    res = kato_smoothing_ratio(packet(g), 0.0, times=np.linspace(-0.01, 0.01, 101))
    assert res.warning is not None
    assert res.ratio < KATO


# --- Strichartz / smoothing ----------------------------------------------------------


@pytest.fixture(scope="module")
def airy_run():
    g = make_grid(1, 4096, 200 * math.pi)
    u0 = gaussian(g)
    traj = linear_trajectory(u0, EquationSpec("airy", 1, 4), hybrid_schedule(4.0, 0.5, 0.01, 1.05),
                             max_stored=None)
    return u0, traj


def test_theta_zero_is_isometry(airy_run):
    u0, traj = airy_run
    assert strichartz_ratio(u0, StrichartzPair(0.0, 0.3), traj) == pytest.approx(1.0, abs=1e-12)


def test_strichartz_ratios_finite(airy_run):
    u0, traj = airy_run
    for theta in (0.25, 0.5, 1.0):
        for alpha in (0.0, 0.5):
            r = strichartz_ratio(u0, StrichartzPair(theta, alpha), traj)
            assert np.isfinite(r) and r > 0


def test_inadmissible_pairs():
    for bad in (lambda: StrichartzPair(1.2, 0.0), lambda: StrichartzPair(0.5, 0.7), lambda: SmoothingPair(1.0)):
        with pytest.raises(UsageError):
            bad()


def test_pair_exponents():
    pair = StrichartzPair(0.4, 0.5)
    assert (pair.q, pair.p) == (pytest.approx(10.0), pytest.approx(10 / 3))
    crit = SmoothingPair(0.8)
    assert (crit.p, crit.q, crit.order) == (pytest.approx(5.0), pytest.approx(10.0), pytest.approx(0.0))


def test_smoothing_ratio_bounded_by_identity(airy_run):
    u0, traj = airy_run
    r = smoothing_ratio(u0, SmoothingPair(0.0), traj)
    # a finite window can only see part of the full-line identity
    assert 0.0 < r <= KATO * 1.001
    with pytest.raises(SingularityError):
        smoothing_ratio(u0, SmoothingPair(0.9), traj)  # negative order on nonzero-mean data
