"""Workspace-topology analysis of 3R orthogonal positioning manipulators."""

from .kinematics import (
    CrossSectionPoint,
    DesignParams,
    IkSolutionSet,
    JointConfig,
    SpatialPoint,
    forward_kinematics,
    inverse_kinematics,
    jacobian_det,
    reduced_fk,
)
from .classifier import SurfaceValues, TopologyLabel, classify, surface_values

__all__ = [
    "CrossSectionPoint",
    "DesignParams",
    "IkSolutionSet",
    "JointConfig",
    "SpatialPoint",
    "SurfaceValues",
    "TopologyLabel",
    "classify",
    "forward_kinematics",
    "inverse_kinematics",
    "jacobian_det",
    "reduced_fk",
    "surface_values",
]

__version__ = "0.1.0"
