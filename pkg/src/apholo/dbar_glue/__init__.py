"""Solving the Cousin problem on a cover of the boundary circle and gluing
local approximants into a single holomorphic function on the disk."""

from .cauchy import CauchyTransform, cauchy_polar, fit_width_constant, width_constant
from .cocycle import Cocycle, PartitionSum, PolarGrid, Resolution, build_cocycle, resolve_cocycle
from .cover import (
    Chart,
    CircularNeighbourhood,
    Restriction,
    build_cover,
    chart_transitions,
    sector_half_width,
    singular_chart,
)
from .glue import GlueConfig, first_glue, second_glue
from .partition import AngularPartition, RadialPartition, angular_dbar, radial_partition
from .pipeline import ApproximationReport, Certificate, CertificateBlock, approximate, build_certificate, dbar_residual


def cauchy_transform(h, a, b, **kw):
    """Cauchy transform of ``h`` over the annulus ``a <= |z| <= b``."""
    return CauchyTransform(h, a, b, **kw)


__all__ = [
    "AngularPartition", "ApproximationReport", "CauchyTransform", "Certificate", "CertificateBlock",
    "Chart", "CircularNeighbourhood", "Cocycle", "Restriction", "GlueConfig", "PartitionSum", "PolarGrid",
    "RadialPartition", "Resolution", "angular_dbar", "approximate", "build_certificate", "fit_width_constant",
    "build_cocycle", "build_cover", "cauchy_polar", "cauchy_transform", "chart_transitions",
    "dbar_residual", "first_glue", "radial_partition", "resolve_cocycle", "second_glue",
    "sector_half_width", "singular_chart", "width_constant",
]
