"""Continuous motion simulation for one entity of a discrete plan step.

Builds the entity's sphere world (environment obstacles, frozen entities
and forbidden regions, all enlarged by the entity radius), maps it to the
point world, and integrates the adaptive navigation controller with the
selected numeric kernel.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

from ..world import FrictionSpec
from . import kernels
from .geometry import build_point_world, build_sphere_world

STATUS_NAMES = {0: "arrived", 1: "timeout", 2: "safety", 3: "diverged"}

_FRIC_KINDS = {"none": 0, "viscous": 1, "sinusoidal": 2}


@dataclass(frozen=True)
class ControlParams:
    k1: float = 0.01         # goal attraction gain of the navigation fn
    k2: float = 5.0          # obstacle barrier gain
    kphi: float = 1.0        # gradient feedback gain
    kv: float = 1.0          # velocity error damping
    km: float = 0.01         # mass adaptation rate
    kalpha: float = 0.01     # friction-bound adaptation rate
    dt: float = 1e-3
    timeout: float = 120.0   # seconds of simulated time per motion
    speed_tol: float = 1e-2  # arrival speed threshold
    rbar: float | None = None    # pinned clearance radius (point world)
    tau: float | None = None     # pinned barrier influence radius
    mhat0: float = 0.0       # initial mass estimate
    ahat0: float = 0.0       # initial friction-bound estimate

    @staticmethod
    def from_scenario(scenario, **overrides):
        known = {f for f in ControlParams.__dataclass_fields__}
        cfg = {k: v for k, v in (scenario.control or {}).items() if k in known}
        cfg.update(overrides)
        return ControlParams(**cfg)

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass
class MotionResult:
    status: int
    t: float
    x: float
    y: float
    vx: float
    vy: float
    mhat: float
    ahat: float
    log: list

    @property
    def ok(self):
        return self.status == 0

    @property
    def status_name(self):
        return STATUS_NAMES.get(self.status, str(self.status))


def simulate_motion(scenario, radius, mass, friction, start, goal,
                    dst_disk, frozen_disks, excluded_region_ids,
                    params=None, log_every=0):
    """Drive one entity from ``start`` to ``goal`` inside ``dst_disk``.

    radius/mass/friction describe the moving entity (possibly a coupled
    robots+object ball); frozen_disks are (x, y, r) triples of everything
    else; dst_disk is the goal region's disk (arrival requires the entity
    ball inside it, nearly at rest).  Returns a MotionResult.
    """
    p = params or ControlParams.from_scenario(scenario)
    if friction is None:
        friction = FrictionSpec()
    if friction.alpha > 0 and p.kphi <= friction.alpha / 2.0:
        warnings.warn(
            f"gradient gain kphi={p.kphi} is not above half the friction "
            f"bound {friction.alpha}; convergence is not guaranteed",
            RuntimeWarning, stacklevel=2)
    sw = build_sphere_world(scenario, radius, frozen_disks,
                            excluded_region_ids)
    pw, tau = build_point_world(sw, goal, rbar=p.rbar, tau=p.tau)
    kind = _FRIC_KINDS[friction.kind]
    prob = {
        "cx": pw.cx, "cy": pw.cy, "scale": pw.scale,
        "bx": pw.bx, "by": pw.by, "rho": pw.rho, "w": pw.w,
        "gx": pw.goal[0], "gy": pw.goal[1],
        "k1": p.k1, "k2": p.k2, "tau": tau,
        "kphi": p.kphi, "kv": p.kv, "km": p.km, "kalpha": p.kalpha,
        "mass": mass, "fric_kind": kind,
        "fric_a": friction.param("c") if kind == 1 else friction.param("amp"),
        "fric_b": friction.param("freq"),
        "dst_x": dst_disk.cx, "dst_y": dst_disk.cy, "dst_r": dst_disk.radius,
        "ent_r": radius, "speed_tol": p.speed_tol,
        "x0": start[0], "y0": start[1], "vx0": 0.0, "vy0": 0.0,
        "mhat0": p.mhat0, "ahat0": p.ahat0,
    }
    status, t, x, y, vx, vy, mhat, ahat, log = kernels.run_motion(
        prob, p.dt, p.timeout, log_every)
    return MotionResult(status, t, x, y, vx, vy, mhat, ahat, log)


LOG_COLUMNS = ("t", "x", "y", "vx", "vy", "ux", "uy",
               "mhat", "ahat", "clearance")


def write_log_csv(path, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(LOG_COLUMNS)
        out.writerows(rows)


def write_trajectory_svg(path, scenario, trails, size=640):
    """Workspace picture: obstacles, regions and one polyline per trail.

    trails: list of (name, [(x, y), ...]) in world coordinates.
    """
    ws = scenario.workspace
    s = size / (2.0 * ws.radius)

    def sx(x):
        return (x - ws.cx) * s + size / 2.0

    def sy(y):
        return size / 2.0 - (y - ws.cy) * s

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">',
             f'<circle cx="{size/2}" cy="{size/2}" r="{ws.radius*s:.2f}" '
             'fill="white" stroke="black"/>']
    for o in scenario.obstacles:
        parts.append(f'<circle cx="{sx(o.cx):.2f}" cy="{sy(o.cy):.2f}" '
                     f'r="{o.radius*s:.2f}" fill="#bbb" stroke="black"/>')
    for rid, reg in scenario.regions.items():
        d = reg.disk
        parts.append(f'<circle cx="{sx(d.cx):.2f}" cy="{sy(d.cy):.2f}" '
                     f'r="{d.radius*s:.2f}" fill="none" stroke="green"/>')
        parts.append(f'<text x="{sx(d.cx):.2f}" y="{sy(d.cy):.2f}" '
                     f'font-size="12" text-anchor="middle">{rid}</text>')
    colors = ["#c00", "#00c", "#c60", "#609", "#066", "#900"]
    for i, (name, pts) in enumerate(trails):
        if not pts:
            continue
        path_d = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{path_d}" fill="none" '
                     f'stroke="{colors[i % len(colors)]}" stroke-width="1">'
                     f'<title>{name}</title></polyline>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
