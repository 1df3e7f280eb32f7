"""Metrics, symbolic curvature and the finite-difference curvature oracle."""

from geotherm.app.geometry.curvature import (
    CurvatureBundle,
    christoffel,
    curvature_bundle,
    curvature_scalar,
    metric_determinant,
    metric_inverse,
    ricci_tensor,
    riemann_tensor,
)
from geotherm.app.geometry.metric import MetricField, metric_from_components
from geotherm.app.geometry.oracle import curvature_numeric_oracle

__all__ = [
    "CurvatureBundle",
    "MetricField",
    "christoffel",
    "curvature_bundle",
    "curvature_numeric_oracle",
    "curvature_scalar",
    "metric_determinant",
    "metric_from_components",
    "metric_inverse",
    "ricci_tensor",
    "riemann_tensor",
]
