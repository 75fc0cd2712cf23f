"""Numerical checks of the Kähler geometry of the lognormal manifold's tangent bundle."""

from __future__ import annotations

__version__ = "0.1.0"
