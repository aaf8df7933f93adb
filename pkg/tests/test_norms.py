from __future__ import annotations

import math

import numpy as np
import pytest

from dispersive_lab.analysis.norms import (
    AnisotropicYX,
    Lebesgue,
    Lorentz,
    MixedXT,
    Sobolev,
    conjugate,
    lorentz_norm,
    mixed_norm,
    norm,
    trapezoid_weights,
)
from dispersive_lab.dynamics import EquationSpec, hybrid_schedule, linear_trajectory
from dispersive_lab.errors import SingularityError, UsageError
from dispersive_lab.spectral import Field, make_grid


def layer_cake(values, cell, p, q):
    """Independent route: sum the layer-cake integral level by level in closed form.

    Between consecutive distinct levels ``l_{j-1} < lam < l_j`` the distribution
    function is constant, so ``p int lam^{q-1} mu^{q/p}`` integrates exactly.
    """
    a = np.sort(np.abs(np.ravel(values)))
    levels = np.unique(a)
    total = 0.0
    lower = 0.0
    for lev in levels:
        mu = np.count_nonzero(a >= lev) * cell
        total += mu ** (q / p) * (lev**q - lower**q) / q
        lower = lev
    return (p * total) ** (1.0 / q)


# --- Lebesgue / Sobolev / anisotropic ------------------------------------------------


def test_lebesgue_matches_definition():
    g = make_grid(1, 64, 8.0)
    v = np.random.default_rng(0).normal(size=64)
    f = Field(g, v)
    assert norm(f, Lebesgue(3.0)) == pytest.approx((np.sum(np.abs(v) ** 3) * g.cell) ** (1 / 3), rel=1e-14)
    assert norm(f, Lebesgue(math.inf)) == np.max(np.abs(v))


def test_exponent_below_one_rejected():
    for bad in (lambda: Lebesgue(0.5), lambda: Lorentz(2.0, 0.9), lambda: MixedXT(0.5, 2.0)):
        with pytest.raises(UsageError):
            bad()


def test_sobolev_zero_is_l2():
    g = make_grid(2, 16, (3.0, 5.0))
    f = Field(g, np.random.default_rng(1).normal(size=g.shape))
    assert norm(f, Sobolev(0.0)) == pytest.approx(norm(f, Lebesgue(2.0)), rel=1e-12)


def test_homogeneous_sobolev_of_sine():
    g = make_grid(1, 32, 2 * math.pi)
    f = Field.from_function(g, lambda x: np.sin(3 * x))
    assert norm(f, Sobolev(1.0, homogeneous=True)) == pytest.approx(3 * math.sqrt(math.pi), rel=1e-12)
    with pytest.raises(SingularityError):
        norm(Field(g, 1 + np.sin(g.x(0))), Sobolev(-1.0, homogeneous=True))


def test_anisotropic_two_two_is_l2():
    g = make_grid(3, 8, (2.0, 3.0, 4.0))
    f = Field(g, np.random.default_rng(2).normal(size=g.shape))
    assert norm(f, AnisotropicYX(2.0, 2.0)) == pytest.approx(norm(f, Lebesgue(2.0)), rel=1e-12)


def test_anisotropic_order_of_integration():
    g = make_grid(2, 8, (1.0, 1.0))
    v = np.zeros(g.shape)
    v[:, 0] = 1.0  # a line along x at one transverse node
    # inner L^2_x gives 1 on that node, outer L^6_y gives (dy)^{1/6}
    assert norm(Field(g, v), AnisotropicYX(6.0, 2.0)) == pytest.approx((1 / 8) ** (1 / 6), rel=1e-14)


def test_conjugate():
    assert conjugate(2.0) == 2.0
    assert conjugate(1.0) == math.inf
    assert conjugate(math.inf) == 1.0
    assert conjugate(4.0) == pytest.approx(4 / 3)


# --- Lorentz ---------------------------------------------------------------------


@pytest.mark.parametrize("p, q, count", [(2.0, 1.0, 64), (2.0, 2.0, 10), (3.0, 1.5, 37), (1.5, 4.0, 200)])
def test_lorentz_indicator_closed_form(p, q, count):
    cell = 1 / 16
    v = np.zeros(256)
    v[:count] = 1.0
    a = count * cell
    assert lorentz_norm(v, cell, p, q) == pytest.approx((p / q) ** (1 / q) * a ** (1 / p), rel=1e-9)


def test_lorentz_weak_indicator():
    v = np.zeros(100)
    v[:25] = 2.0
    assert lorentz_norm(v, 0.5, 3.0, math.inf) == pytest.approx(2.0 * 12.5 ** (1 / 3), rel=1e-14)


def test_two_valued_step_functions_against_layer_cake():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p, q = rng.uniform(1.0, 7.0, size=2)
        v = np.zeros(500)
        k1, k2 = rng.integers(1, 240, size=2)
        v[:k1] = rng.uniform(1.0, 4.0)
        v[k1 : k1 + k2] = rng.uniform(0.05, 0.95)
        rng.shuffle(v)
        assert lorentz_norm(v, 0.01, p, q) == pytest.approx(layer_cake(v, 0.01, p, q), rel=1e-9)


def test_lorentz_diagonal_is_lebesgue():
    rng = np.random.default_rng(4)
    g = make_grid(1, 256, 10.0)
    for _ in range(100):
        p = float(rng.uniform(1.0, 8.0))
        f = Field(g, rng.normal(size=256))
        assert norm(f, Lorentz(p, p)) == pytest.approx(norm(f, Lebesgue(p)), rel=1e-9)


def test_random_fields_against_layer_cake():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p, q = rng.uniform(1.0, 6.0, size=2)
        v = rng.normal(size=300)
        assert lorentz_norm(v, 0.1, p, q) == pytest.approx(layer_cake(v, 0.1, p, q), rel=1e-9)


# --- space-time norms ---------------------------------------------------------------


def test_trapezoid_weights_integrate_linear_functions():
    t = np.array([0.0, 0.3, 1.0, 2.5, 4.0])
    w = trapezoid_weights(t)
    assert np.sum(w) == pytest.approx(4.0)
    assert np.sum(w * (2 * t + 1)) == pytest.approx(4.0**2 + 4.0)


def constant_trajectory(T, value=1.5):
    g = make_grid(1, 32, 4.0)
    u = Field(g, np.full(32, value))
    return linear_trajectory(u, EquationSpec("airy", 1, 4), np.linspace(0, T, 11), max_stored=None,
                             wrap_threshold=1.0), u


@pytest.mark.parametrize("q, p", [(2.0, 3.0), (6.0, 2.0), (math.inf, 4.0)])
def test_constant_in_time_separates(q, p):
    T = 3.0
    traj, u = constant_trajectory(T)
    expected = (1.0 if math.isinf(q) else T ** (1 / q)) * norm(u, Lebesgue(p))
    assert mixed_norm(traj, MixedXT(p, q, "t-outer")) == pytest.approx(expected, rel=1e-12)
    assert mixed_norm(traj, MixedXT(p, q, "x-outer")) == pytest.approx(
        (1.0 if math.isinf(q) else T ** (1 / q)) * norm(u, Lebesgue(p)), rel=1e-12
    )


def test_zero_trajectory_has_zero_norm():
    traj, _ = constant_trajectory(2.0, 0.0)
    assert mixed_norm(traj, MixedXT(5.0, 10.0, "x-outer")) == 0.0
    assert mixed_norm(traj, MixedXT(2.0, 4.0, "t-outer", q_lorentz=2.0)) == 0.0


def test_window_after_wrap_is_rejected():
    traj, _ = constant_trajectory(2.0)
    traj.wrap_time = 1.0
    with pytest.raises(UsageError):
        mixed_norm(traj, MixedXT(2.0, 2.0), window=(0.0, 2.0))


def test_missing_fields_are_rejected():
    g = make_grid(1, 32, 4.0)
    traj = linear_trajectory(Field(g, np.ones(32)), EquationSpec("airy", 1, 4), np.linspace(0, 1, 11), max_stored=3)
    with pytest.raises(UsageError):
        mixed_norm(traj, MixedXT(2.0, 2.0))


def test_critical_norm_stable_under_snapshot_refinement():
    g = make_grid(1, 4096, 200 * math.pi)
    u0 = Field.from_function(g, lambda x: np.exp(-0.5 * x * x))
    spec = EquationSpec("airy", 1, 4)
    coarse = linear_trajectory(u0, spec, hybrid_schedule(8.0, 2.0, 0.02, 1.04), max_stored=None)
    fine = linear_trajectory(u0, spec, hybrid_schedule(8.0, 2.0, 0.01, 1.02), max_stored=None)
    end = min(coarse.valid_until, fine.valid_until)
    assert end > 5.0
    a = mixed_norm(coarse, MixedXT(5.0, 10.0, "x-outer"), window=(0.0, end))
    b = mixed_norm(fine, MixedXT(5.0, 10.0, "x-outer"), window=(0.0, end))
    assert abs(a / b - 1.0) < 0.02


def test_lorentz_in_time_reduces_to_lebesgue():
    g = make_grid(1, 256, 40.0)
    u0 = Field.from_function(g, lambda x: np.exp(-0.5 * x * x))
    traj = linear_trajectory(u0, EquationSpec("airy", 1, 4), np.linspace(0, 3, 31), max_stored=None)
    # with equal exponents the rearrangement changes nothing
    a = mixed_norm(traj, MixedXT(4.0, 3.0, "t-outer", q_lorentz=3.0))
    b = mixed_norm(traj, MixedXT(4.0, 3.0, "t-outer"))
    assert a == pytest.approx(b, rel=1e-12)
