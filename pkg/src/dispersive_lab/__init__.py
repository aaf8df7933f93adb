"""Pseudospectral laboratory for decay, smoothing and Strichartz estimates of gKdV/gZK flows."""

from __future__ import annotations

__version__ = "0.1.0"
