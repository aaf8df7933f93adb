"""Power-law decay fits on log-log axes."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import linregress

from ..errors import UsageError
from .norms import window_indices


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line through ``(log t, log value)`` on a time window.

    ``weighted_sup`` is ``max t^weight * value`` over the samples in the
    window, a snapshot lower bound for the corresponding sup over time;
    ``samples_per_decade`` tells how densely that sup was sampled.
    """

    window: tuple[float, float]
    exponent: float
    amplitude: float
    stderr: float
    r_squared: float
    weight: float
    weighted_sup: float
    n_samples: int
    samples_per_decade: float

    def as_dict(self) -> dict[str, object]:
        out = asdict(self)
        out["window"] = list(self.window)
        return out


def decay_fit(
    times: np.ndarray,
    values: np.ndarray,
    window: tuple[float, float] | None = None,
    weight: float | None = None,
) -> DecayFit:
    """Fit ``value ~ amplitude * t^exponent`` on ``window``.

    Parameters
    ----------
    weight:
        Exponent ``w`` used in ``weighted_sup = max t^w value``; defaults to
        ``-exponent``.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape:
        raise UsageError("times and values must have the same shape")
    if window is None:
        positive = t[t > 0]
        if positive.size == 0:
            raise UsageError("no positive times to fit")
        window = (float(positive.min()), float(positive.max()))
    idx = window_indices(t, (float(window[0]), float(window[1])))
    idx = idx[t[idx] > 0]
    if idx.size < 5:
        raise UsageError(f"need at least 5 samples in the fit window, got {idx.size}")
    tw, vw = t[idx], v[idx]
    if not np.all(np.isfinite(vw)) or np.any(vw <= 0):
        raise UsageError("decay fit needs finite positive values (blow-up or underflow?)")
    res = linregress(np.log(tw), np.log(vw))
    exponent = float(res.slope)
    w = -exponent if weight is None else float(weight)
    span = math.log10(tw[-1] / tw[0]) if tw[-1] > tw[0] else 0.0
    return DecayFit(
        window=(float(window[0]), float(window[1])),
        exponent=exponent,
        amplitude=float(math.exp(res.intercept)),
        stderr=float(res.stderr),
        r_squared=float(res.rvalue**2),
        weight=w,
        weighted_sup=float(np.max(tw**w * vw)),
        n_samples=int(idx.size),
        samples_per_decade=float(idx.size / span) if span > 0 else math.inf,
    )


__all__ = ["DecayFit", "decay_fit"]
