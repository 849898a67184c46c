"""Free-space geometry for a single entity motion.

The moving entity is shrunk to a point by enlarging everything else with
its radius: environment obstacles, the other (frozen) entities and the
regions the motion must not enter.  Overlapping enlarged disks are merged
into covering disks so the sphere-world assumption (disjoint internal
disks inside one bounding disk) holds; the point-world construction then
assigns each internal disk a radial purging annulus and a point image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ObstacleDisk:
    cx: float
    cy: float
    r: float


@dataclass
class SphereWorld:
    """Bounding free disk (already shrunk by the entity radius) plus
    disjoint internal obstacle disks (already enlarged), world coords."""

    cx: float
    cy: float
    radius: float
    obstacles: list

    def validate(self, margin=0.0):
        for o in self.obstacles:
            d = math.hypot(o.cx - self.cx, o.cy - self.cy)
            if d + o.r >= self.radius - margin:
                raise ValueError("obstacle disk reaches the outer boundary")
        for a in range(len(self.obstacles)):
            for b in range(a + 1, len(self.obstacles)):
                oa, ob = self.obstacles[a], self.obstacles[b]
                if math.hypot(oa.cx - ob.cx, oa.cy - ob.cy) \
                        <= oa.r + ob.r + margin:
                    raise ValueError("obstacle disks overlap")

    def point_free(self, x, y):
        if math.hypot(x - self.cx, y - self.cy) >= self.radius:
            return False
        return all(math.hypot(x - o.cx, y - o.cy) > o.r for o in self.obstacles)


@dataclass
class PointWorld:
    """Unit-disk picture: every obstacle disk collapsed toward a point."""

    cx: float                # sphere-world center (world coords)
    scale: float             # sphere-world radius; A(x) = (x - c) / scale
    cy: float = 0.0
    bx: list = field(default_factory=list)    # obstacle points, unit coords
    by: list = field(default_factory=list)
    rho: list = field(default_factory=list)   # enlarged radii, unit coords
    w: list = field(default_factory=list)     # purging annulus widths
    rbar: float = 0.0        # clearance radius (Prop.-1 separation)
    goal: tuple = (0.0, 0.0)  # transformed goal χ_d
    rbar_d: float = 0.0      # goal clearance, squared-distance units

    @property
    def n_obstacles(self):
        return len(self.bx)


def merge_disks(disks, gap=1e-9):
    """Disjoint covering set: drop contained disks, merge overlapping pairs
    into their smallest covering disk, repeat to a fixpoint."""
    out = [ObstacleDisk(d.cx, d.cy, d.r) for d in disks]
    changed = True
    while changed:
        changed = False
        for a in range(len(out)):
            for b in range(a + 1, len(out)):
                da, db = out[a], out[b]
                d = math.hypot(da.cx - db.cx, da.cy - db.cy)
                if d > da.r + db.r + gap:
                    continue
                if d + db.r <= da.r:
                    merged = da
                elif d + da.r <= db.r:
                    merged = db
                else:
                    r = (d + da.r + db.r) / 2.0
                    t = (r - da.r) / d
                    merged = ObstacleDisk(da.cx + t * (db.cx - da.cx),
                                          da.cy + t * (db.cy - da.cy), r)
                out[a] = merged
                del out[b]
                changed = True
                break
            if changed:
                break
    return out


def build_sphere_world(scenario, entity_radius, frozen_disks, excluded_region_ids):
    """Sphere world seen by one moving entity.

    frozen_disks: (x, y, r) triples for the entities that stay put.
    excluded_region_ids: regions the motion must not enter (all of K except
    the motion's endpoints).
    """
    ws = scenario.workspace
    raw = [ObstacleDisk(o.cx, o.cy, o.radius + entity_radius)
           for o in scenario.obstacles]
    raw += [ObstacleDisk(x, y, r + entity_radius) for (x, y, r) in frozen_disks]
    for rid in excluded_region_ids:
        d = scenario.region(rid).disk
        raw.append(ObstacleDisk(d.cx, d.cy, d.radius + entity_radius))
    sw = SphereWorld(ws.cx, ws.cy, ws.radius - entity_radius, merge_disks(raw))
    sw.validate()
    return sw


def build_point_world(sw, goal_xy, rbar=None, tau=None):
    """Point-world data for a sphere world and a goal position.

    Returns (PointWorld, tau).  rbar/tau may be pinned by the caller;
    otherwise they are derived from the actual clearances.  The quintic
    purging annuli are sized to stay pairwise disjoint and inside the unit
    disk, which keeps the composed map a diffeomorphism.
    """
    R = sw.radius
    bx = [(o.cx - sw.cx) / R for o in sw.obstacles]
    by = [(o.cy - sw.cy) / R for o in sw.obstacles]
    rho = [o.r / R for o in sw.obstacles]
    n = len(bx)

    # annulus widths: a fraction of the distance to the nearest other
    # obstacle boundary / outer boundary, capped by the obstacle radius
    w = []
    for i in range(n):
        room = 1.0 - math.hypot(bx[i], by[i]) - rho[i]
        for j in range(n):
            if j != i:
                gap = (math.hypot(bx[i] - bx[j], by[i] - by[j])
                       - rho[i] - rho[j])
                room = min(room, gap)
        if room <= 0:
            raise ValueError("no room for a purging annulus")
        w.append(min(rho[i], 0.45 * room))

    # clearance radius for Prop.-1 style separation of the barrier bumps
    sep = 2.0
    for i in range(n):
        sep = min(sep, 1.0 - math.hypot(bx[i], by[i]))
        for j in range(i + 1, n):
            sep = min(sep, math.hypot(bx[i] - bx[j], by[i] - by[j]))
    derived_rbar = 0.45 * sep
    if rbar is None:
        rbar = derived_rbar
    elif 2.0 * rbar >= sep:
        raise ValueError(f"requested clearance {rbar} violates separation {sep}")

    pw = PointWorld(cx=sw.cx, cy=sw.cy, scale=R, bx=bx, by=by, rho=rho, w=w,
                    rbar=rbar)
    gx, gy = transform_py(pw, goal_xy[0], goal_xy[1])[0]
    pw.goal = (gx, gy)
    rbar_d = 1.0 - (gx * gx + gy * gy)
    for i in range(n):
        rbar_d = min(rbar_d, (gx - bx[i]) ** 2 + (gy - by[i]) ** 2)
    pw.rbar_d = rbar_d
    if tau is None:
        tau = min(rbar * rbar, 0.5 * rbar_d)
    if tau > rbar * rbar or tau >= rbar_d or tau <= 0:
        raise ValueError(f"tau={tau} incompatible with rbar={rbar}, "
                         f"goal clearance {rbar_d}")
    return pw, tau


def _smoothstep(u):
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _smoothstep_d(u):
    return 30.0 * u * u * (1.0 - u) * (1.0 - u)


def transform_py(pw, x, y):
    """H(x): world position -> (χ, J_H).  Reference implementation; the
    numeric kernels reimplement this for the inner loop."""
    s = pw.scale
    cx = (x - pw.cx) / s
    cy = (y - pw.cy) / s
    # Jacobian of the rescale
    j00, j01, j10, j11 = 1.0 / s, 0.0, 0.0, 1.0 / s
    for i in range(pw.n_obstacles):
        dx = cx - pw.bx[i]
        dy = cy - pw.by[i]
        d = math.hypot(dx, dy)
        rho, w = pw.rho[i], pw.w[i]
        if d >= rho + w:
            continue
        if d <= rho:
            raise ValueError("position inside an obstacle disk")
        u = (rho + w - d) / w
        g = d - rho * _smoothstep(u)
        gp = 1.0 + (rho / w) * _smoothstep_d(u)
        rx, ry = dx / d, dy / d
        # radial map Jacobian: (g/d)(I - rr^T) + g' rr^T
        t = g / d
        a00 = t + (gp - t) * rx * rx
        a01 = (gp - t) * rx * ry
        a11 = t + (gp - t) * ry * ry
        cx = pw.bx[i] + rx * g
        cy = pw.by[i] + ry * g
        j00, j01, j10, j11 = (a00 * j00 + a01 * j10, a00 * j01 + a01 * j11,
                              a01 * j00 + a11 * j10, a01 * j01 + a11 * j11)
        break  # annuli are disjoint: at most one map acts
    return (cx, cy), (j00, j01, j10, j11)


def inverse_transform_py(pw, chix, chiy):
    """Numerical inverse of transform_py (radial bisection per obstacle)."""
    cx, cy = chix, chiy
    for i in range(pw.n_obstacles):
        dx = cx - pw.bx[i]
        dy = cy - pw.by[i]
        d = math.hypot(dx, dy)
        rho, w = pw.rho[i], pw.w[i]
        if d >= rho + w or d == 0.0:
            continue
        lo, hi = rho, rho + w
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            u = (rho + w - mid) / w
            if mid - rho * _smoothstep(u) < d:
                lo = mid
            else:
                hi = mid
        dd = 0.5 * (lo + hi)
        cx = pw.bx[i] + dx / d * dd
        cy = pw.by[i] + dy / d * dd
        break
    return (pw.cx + pw.scale * cx, pw.cy + pw.scale * cy)
