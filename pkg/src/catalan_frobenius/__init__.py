"""Exact computations for the rank-two Frobenius manifold of the extended Toda/NLS family."""

from __future__ import annotations

__version__ = "0.1.0"
