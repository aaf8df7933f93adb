"""Random smooth corpora and empirical constants for commutator and Lorentz inequalities.

An inequality ``LHS <= C RHS`` is *checked*, not proved: a calibration corpus
drawn from a frozen seed yields ``C_max = max LHS/RHS``; an independent
evaluation corpus passes when no ratio exceeds ``(1 + tolerance) C_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..errors import UsageError
from ..spectral import Field, Grid, apply_multiplier, derivative_multiplier, inverse_array, partial_multiplier
from .norms import lorentz_norm, lp_sum

Form = Literal["kato_ponce", "leibniz_frac", "leibniz_endpoint"]
FORMS: tuple[str, ...] = ("kato_ponce", "leibniz_frac", "leibniz_endpoint")

# parameter ranges sampled by the corpus for each form
PARAMETER_RANGES: dict[str, tuple[tuple[float, float], tuple[float, float]]] = {
    "kato_ponce": ((0.25, 2.5), (1.2, 6.0)),
    "leibniz_frac": ((0.1, 0.9), (1.2, 6.0)),
    "leibniz_endpoint": ((0.1, 0.9), (1.0, 1.0)),
}


@dataclass(frozen=True)
class InequalityEntry:
    sample_id: int
    form: str
    s: float
    p: float
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else math.inf
        return self.lhs / self.rhs


@dataclass
class InequalityReport:
    """Ratios ``LHS/RHS`` over a corpus together with their summary statistics."""

    form: str
    seed: int
    entries: list[InequalityEntry] = field(default_factory=list)
    cap: float | None = None

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([e.ratio for e in self.entries])

    @property
    def max(self) -> float:
        return float(np.max(self.ratios)) if self.entries else 0.0

    @property
    def median(self) -> float:
        return float(np.median(self.ratios)) if self.entries else 0.0

    @property
    def violations(self) -> int:
        if self.cap is None:
            return 0
        r = self.ratios
        return int(np.count_nonzero(~np.isfinite(r) | (r > self.cap)))

    def summary(self) -> dict[str, object]:
        return {
            "form": self.form,
            "seed": self.seed,
            "size": self.size,
            "max": self.max,
            "median": self.median,
            "cap": self.cap,
            "violations": self.violations,
        }


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


def sample_seeds(seed: int, size: int) -> list[np.random.SeedSequence]:
    """Independent per-sample seed sequences; sample ``i`` does not depend on ``size``."""
    return np.random.SeedSequence(seed).spawn(size)


def gaussian_polynomial(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Gaussian with random centre and width times a random polynomial of degree <= 4."""
    coords = grid.x_mesh()
    arg = np.zeros(grid.shape)
    envelope = np.ones(grid.shape)
    for a, x in enumerate(coords):
        centre = rng.uniform(-grid.L[a] / 8, grid.L[a] / 8)
        width = rng.uniform(0.5, 3.0)
        z = (x - centre) / width
        arg = arg + z
        envelope = envelope * np.exp(-0.5 * z * z)
    degree = int(rng.integers(0, 5))
    coef = rng.normal(size=degree + 1)
    poly = np.polynomial.polynomial.polyval(arg / math.sqrt(grid.d), coef)
    if not np.any(poly):
        poly = np.ones(grid.shape)
    return poly * envelope


def random_phase(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Real field with random phases and spectral amplitude ``(1 + |xi|^2)^{-sigma/2}``, ``sigma`` in [1, 3].

    A Gaussian roll-off at a quarter of the Nyquist wavenumber keeps the
    samples smooth on the grid.
    """
    sigma = rng.uniform(1.0, 3.0)
    r2 = grid.xi_modulus() ** 2
    cutoff = 0.25 * min(math.pi / h for h in grid.dx)
    amp = (1.0 + r2) ** (-0.5 * sigma) * np.exp(-r2 / cutoff**2)
    noise = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    values = inverse_array(grid, amp * noise).real
    return values


def random_smooth_field(grid: Grid, rng: np.random.Generator, kind: str | None = None) -> np.ndarray:
    """One corpus member: ``kind`` is ``'gaussian'``, ``'phase'`` or random."""
    if kind is None:
        kind = "gaussian" if rng.random() < 0.5 else "phase"
    if kind == "gaussian":
        return gaussian_polynomial(grid, rng)
    if kind == "phase":
        return random_phase(grid, rng)
    raise UsageError(f"unknown corpus kind {kind!r}")


def unit_l2(values: np.ndarray, grid: Grid) -> np.ndarray:
    n = float(lp_sum(values, grid.cell, 2.0))
    return values / n if n > 0 else values


# ---------------------------------------------------------------------------
# Commutator and Leibniz forms
# ---------------------------------------------------------------------------


def _op(values: np.ndarray, grid: Grid, order: float, kind: str) -> np.ndarray:
    return apply_multiplier(Field(grid, values), derivative_multiplier(order, kind)).data


def _check_range(form: str, s: float, p: float) -> None:
    if form == "kato_ponce":
        ok = s > 0 and 1 < p < math.inf
    elif form == "leibniz_frac":
        ok = 0 < s < 1 and 1 < p < math.inf
    elif form == "leibniz_endpoint":
        ok = 0 < s < 1 and p == 1
    else:
        raise UsageError(f"unknown inequality form {form!r}; expected one of {FORMS}")
    if not ok:
        raise UsageError(f"(s={s!r}, p={p!r}) lies outside the admissible range of {form}")


def commutator_check(f: Field, g: Field, s: float, p: float, form: str, sample_id: int = 0) -> InequalityEntry:
    """Both sides of a commutator or fractional Leibniz inequality.

    ``kato_ponce``:        ||J^s(fg) - f J^s g||_p  vs  ||g||_inf ||J^s f||_p + ||f'||_inf ||J^{s-1} g||_p
    ``leibniz_frac``:      ||D^s(fg) - f D^s g - g D^s f||_p  vs  ||g||_inf ||D^s f||_p
    ``leibniz_endpoint``:  ||D^s(fg)||_1  vs  ||g D^s f||_1 + ||f||_2 ||D^s g||_2
    """
    _check_range(form, s, p)
    if f.grid != g.grid:
        raise UsageError("f and g must live on the same grid")
    grid = f.grid
    fv, gv = f.values(), g.values()
    cell = grid.cell
    fg = fv * gv
    if form == "kato_ponce":
        lhs = lp_sum(_op(fg, grid, s, "J") - fv * _op(gv, grid, s, "J"), cell, p)
        df = apply_multiplier(Field(grid, fv), partial_multiplier(0)).data
        rhs = float(np.max(np.abs(gv))) * lp_sum(_op(fv, grid, s, "J"), cell, p) + float(
            np.max(np.abs(df))
        ) * lp_sum(_op(gv, grid, s - 1.0, "J"), cell, p)
    elif form == "leibniz_frac":
        dsf = _op(fv, grid, s, "D")
        lhs = lp_sum(_op(fg, grid, s, "D") - fv * _op(gv, grid, s, "D") - gv * dsf, cell, p)
        rhs = float(np.max(np.abs(gv))) * lp_sum(dsf, cell, p)
    else:
        lhs = lp_sum(_op(fg, grid, s, "D"), cell, 1.0)
        rhs = lp_sum(gv * _op(fv, grid, s, "D"), cell, 1.0) + lp_sum(fv, cell, 2.0) * lp_sum(
            _op(gv, grid, s, "D"), cell, 2.0
        )
    return InequalityEntry(sample_id, form, float(s), float(p), float(lhs), float(rhs))


def _draw_parameters(form: str, rng: np.random.Generator) -> tuple[float, float]:
    (s_lo, s_hi), (p_lo, p_hi) = PARAMETER_RANGES[form]
    s = float(rng.uniform(s_lo, s_hi))
    p = float(rng.uniform(p_lo, p_hi)) if p_hi > p_lo else p_lo
    return s, p


def commutator_corpus(form: str, grid: Grid, size: int, seed: int, cap: float | None = None) -> InequalityReport:
    """Evaluate ``form`` on ``size`` random pairs ``(f, g)`` drawn from ``seed``."""
    if form not in FORMS:
        raise UsageError(f"unknown inequality form {form!r}; expected one of {FORMS}")
    report = InequalityReport(form=form, seed=seed, cap=cap)
    for i, ss in enumerate(sample_seeds(seed, size)):
        rng = np.random.default_rng(ss)
        s, p = _draw_parameters(form, rng)
        f = Field(grid, random_smooth_field(grid, rng))
        g = Field(grid, random_smooth_field(grid, rng))
        report.entries.append(commutator_check(f, g, s, p, form, sample_id=i))
    return report


def calibrated_corpus(
    form: str,
    grid: Grid,
    size: int,
    seed: int,
    calibration_size: int,
    calibration_seed: int,
    tolerance: float = 0.05,
) -> tuple[InequalityReport, InequalityReport]:
    """Calibration report (frozen seed) and evaluation report capped at ``(1 + tolerance) C_max``."""
    calibration = commutator_corpus(form, grid, calibration_size, calibration_seed)
    evaluation = commutator_corpus(form, grid, size, seed, cap=(1.0 + tolerance) * calibration.max)
    return calibration, evaluation


# ---------------------------------------------------------------------------
# Lorentz-space properties
# ---------------------------------------------------------------------------


def lorentz_holder_corpus(grid: Grid, size: int, seed: int, cap: float | None = None) -> InequalityReport:
    """``||fg||_{L^{p,q}}`` against ``||f||_{L^{p1,q1}} ||g||_{L^{p2,q2}}`` with ``1/p = 1/p1 + 1/p2``, ``1/q = 1/q1 + 1/q2``."""
    report = InequalityReport(form="lorentz_holder", seed=seed, cap=cap)
    for i, ss in enumerate(sample_seeds(seed, size)):
        rng = np.random.default_rng(ss)
        p1, p2 = rng.uniform(1.5, 8.0, size=2)
        q1, q2 = rng.uniform(1.5, 8.0, size=2)
        p = 1.0 / (1.0 / p1 + 1.0 / p2)
        q = 1.0 / (1.0 / q1 + 1.0 / q2)
        p, q = max(p, 1.0), max(q, 1.0)
        f = random_smooth_field(grid, rng)
        g = random_smooth_field(grid, rng)
        lhs = lorentz_norm(f * g, grid.cell, p, q)
        rhs = lorentz_norm(f, grid.cell, p1, q1) * lorentz_norm(g, grid.cell, p2, q2)
        report.entries.append(InequalityEntry(i, "lorentz_holder", float(q), float(p), lhs, rhs))
    return report


def lorentz_embedding_corpus(grid: Grid, size: int, seed: int, cap: float | None = None) -> InequalityReport:
    """``||f||_{L^{p,r}}`` against ``||f||_{L^{p,q}}`` for ``q < r``."""
    report = InequalityReport(form="lorentz_embedding", seed=seed, cap=cap)
    for i, ss in enumerate(sample_seeds(seed, size)):
        rng = np.random.default_rng(ss)
        p = float(rng.uniform(1.0, 8.0))
        q = float(rng.uniform(1.0, 6.0))
        r = float(q + rng.uniform(0.1, 6.0)) if rng.random() < 0.8 else math.inf
        f = random_smooth_field(grid, rng)
        lhs = lorentz_norm(f, grid.cell, p, r)
        rhs = lorentz_norm(f, grid.cell, p, q)
        report.entries.append(InequalityEntry(i, "lorentz_embedding", float(q), float(p), lhs, rhs))
    return report


__all__ = [
    "FORMS",
    "PARAMETER_RANGES",
    "InequalityEntry",
    "InequalityReport",
    "sample_seeds",
    "gaussian_polynomial",
    "random_phase",
    "random_smooth_field",
    "unit_l2",
    "commutator_check",
    "commutator_corpus",
    "calibrated_corpus",
    "lorentz_holder_corpus",
    "lorentz_embedding_corpus",
]
