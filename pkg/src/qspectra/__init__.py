"""Klein-Gordon bound states in q-deformed Rosen-Morse potentials."""

from __future__ import annotations

__version__ = "0.1.0"
