"""Geometrothermodynamics of black holes: symbolic metrics, curvature and phase transitions."""

__version__ = "0.3.0"
