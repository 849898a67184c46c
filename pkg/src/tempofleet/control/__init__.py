"""Continuous layer: free-space geometry, navigation functions and the
adaptive motion controller that realizes discrete plan steps."""

from .geometry import (
    ObstacleDisk,
    PointWorld,
    SphereWorld,
    build_point_world,
    build_sphere_world,
    inverse_transform_py,
    merge_disks,
    transform_py,
)
from .kernels import backend_name, run_motion
from .navfn import NavFnParams, beta, navfn
from .runner import (
    ControlParams,
    MotionResult,
    simulate_motion,
    write_log_csv,
    write_trajectory_svg,
)

__all__ = [
    "ObstacleDisk", "PointWorld", "SphereWorld",
    "build_point_world", "build_sphere_world",
    "inverse_transform_py", "merge_disks", "transform_py",
    "backend_name", "run_motion",
    "NavFnParams", "beta", "navfn",
    "ControlParams", "MotionResult", "simulate_motion",
    "write_log_csv", "write_trajectory_svg",
]
