"""Scenario model: workspace geometry, regions, robots, objects and grasps.

Holds the static data every other layer consumes — disk workspace with
circular obstacles, labeled regions of interest, robot/object physical
specs (the true masses and friction bounds are simulation ground truth,
hidden from the controllers) — plus the pure predicates used by the
discrete layer: entity construction, the power predicate, deterministic
sphere packing and region labeling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    radius: float

    @property
    def center(self):
        return (self.cx, self.cy)

    def contains_ball(self, x, y, r):
        return math.hypot(x - self.cx, y - self.cy) + r <= self.radius

    def distance_to(self, other):
        return math.hypot(self.cx - other.cx, self.cy - other.cy)


@dataclass(frozen=True)
class FrictionSpec:
    """Ground-truth friction model; the controllers only ever see bounds
    indirectly through their own adaptation."""

    kind: str = "none"           # none | viscous | sinusoidal
    params: tuple = ()           # sorted (name, value) pairs
    alpha: float = 0.0           # known Lipschitz-type bound (simulator side)

    def param(self, name, default=0.0):
        for k, v in self.params:
            if k == name:
                return v
        return default

    @staticmethod
    def from_json(d):
        if not d:
            return FrictionSpec()
        kind = d.get("kind", "none")
        params = tuple(sorted((k, float(v)) for k, v in d.get("params", {}).items()))
        alpha = d.get("alpha")
        if alpha is None:
            lookup = dict(params)
            if kind == "none":
                alpha = 0.0
            elif kind == "viscous":
                alpha = lookup.get("c", 0.0)
            elif kind == "sinusoidal":
                # |amp·sin(...)|·(exp(-|v|)+1) ≤ 2·amp componentwise
                alpha = 2.0 * lookup.get("amp", 0.0)
            else:
                raise ValueError(f"unknown friction kind {kind!r}")
        return FrictionSpec(kind, params, float(alpha))


@dataclass(frozen=True)
class RobotSpec:
    id: int
    radius: float
    power: int
    mass: float
    friction: FrictionSpec
    init_region: str

    def __post_init__(self):
        if not (self.radius > 0 and self.power > 0 and self.mass > 0):
            raise ValueError(f"robot {self.id}: radius/power/mass must be positive")


@dataclass(frozen=True)
class ObjectSpec:
    id: int
    radius: float
    required_power: int
    mass: float
    friction: FrictionSpec
    init_region: str

    def __post_init__(self):
        if not (self.radius > 0 and self.required_power > 0 and self.mass > 0):
            raise ValueError(f"object {self.id}: fields must be positive")


@dataclass(frozen=True)
class Region:
    id: str
    disk: Disk
    robot_services: tuple = ()   # ((robot_id, frozenset atoms), ...)
    object_services: tuple = ()

    def robot_atoms(self, robot_id):
        for rid, atoms in self.robot_services:
            if rid == robot_id:
                return atoms
        return frozenset({f"{robot_id}-{self.id}"})

    def object_atoms(self, object_id):
        for oid, atoms in self.object_services:
            if oid == object_id:
                return atoms
        return frozenset({f"O{object_id}-{self.id}"})


@dataclass(frozen=True)
class GraspConfig:
    """Which robots grasp which object; only nonempty coalitions are stored."""

    pairs: tuple = ()            # sorted ((object_id, frozenset robot_ids), ...)

    def __post_init__(self):
        seen = set()
        for j, coal in self.pairs:
            if not coal:
                raise ValueError("empty coalition stored in GraspConfig")
            for i in coal:
                if i in seen:
                    raise ValueError(f"robot {i} grasps more than one object")
                seen.add(i)

    @staticmethod
    def of(mapping):
        pairs = tuple(sorted((j, frozenset(c)) for j, c in mapping.items() if c))
        return GraspConfig(pairs)

    def coalition(self, object_id):
        for j, coal in self.pairs:
            if j == object_id:
                return coal
        return frozenset()

    def object_of(self, robot_id):
        for j, coal in self.pairs:
            if robot_id in coal:
                return j
        return None

    def grasping_robots(self):
        out = set()
        for _, coal in self.pairs:
            out |= coal
        return frozenset(out)

    def as_dict(self):
        return {j: coal for j, coal in self.pairs}

    def with_grasp(self, robot_id, object_id):
        d = {j: set(c) for j, c in self.pairs}
        d.setdefault(object_id, set()).add(robot_id)
        return GraspConfig.of(d)

    def without(self, robot_id):
        d = {j: {i for i in c if i != robot_id} for j, c in self.pairs}
        return GraspConfig.of(d)


EMPTY_GRASP = GraspConfig()


@dataclass(frozen=True)
class Entity:
    """A moving unit: a lone robot, an ungrasped object, or a coupled
    robots-object system."""

    kind: str                    # robot | object | system
    robots: frozenset
    object_id: int | None
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("entity radius must be nonnegative")
        if self.kind == "system" and (not self.robots or self.object_id is None):
            raise ValueError("a robots-object system needs robots and an object")

    @property
    def name(self):
        if self.kind == "robot":
            return f"R{min(self.robots)}"
        if self.kind == "object":
            return f"O{self.object_id}"
        coal = ",".join(map(str, sorted(self.robots)))
        return f"T(O{self.object_id}|{coal})"


@dataclass
class Scenario:
    workspace: Disk
    obstacles: list
    regions: dict                # region id -> Region, insertion-ordered
    robots: dict                 # robot id (1-based) -> RobotSpec
    objects: dict                # object id (1-based) -> ObjectSpec
    name: str = "scenario"
    control: dict = field(default_factory=dict)   # optional gain overrides

    @property
    def region_ids(self):
        return list(self.regions)

    def region(self, rid):
        try:
            return self.regions[rid]
        except KeyError:
            raise KeyError(f"unknown region {rid!r}") from None

    def init_robot_regions(self):
        return {i: r.init_region for i, r in self.robots.items()}

    def init_object_regions(self):
        return {j: o.init_region for j, o in self.objects.items()}

    def atom_universe(self):
        atoms = set()
        for reg in self.regions.values():
            for i in self.robots:
                atoms |= reg.robot_atoms(i)
            for j in self.objects:
                atoms |= reg.object_atoms(j)
        return frozenset(atoms)

    def validate(self):
        """Check the static feasibility invariants; raises ValueError."""
        disks = [("region " + r.id, r.disk) for r in self.regions.values()]
        disks += [(f"obstacle {n}", o) for n, o in enumerate(self.obstacles)]
        for name, d in disks:
            if not (self.workspace.contains_ball(d.cx, d.cy, d.radius)
                    and d.distance_to(self.workspace) + d.radius < self.workspace.radius):
                raise ValueError(f"{name} not strictly inside the workspace")
        for a in range(len(disks)):
            for b in range(a + 1, len(disks)):
                (na, da), (nb, db) = disks[a], disks[b]
                if da.distance_to(db) <= da.radius + db.radius:
                    raise ValueError(f"{na} and {nb} are not disjoint")
        for i, r in self.robots.items():
            self.region(r.init_region)
        for j, o in self.objects.items():
            self.region(o.init_region)
        # initial placement must pack per region (no grasps initially)
        by_region = {}
        for e, rid in zip(entities(self, EMPTY_GRASP),
                          list(self.init_robot_regions().values())
                          + list(self.init_object_regions().values())):
            by_region.setdefault(rid, []).append(e.radius)
        for rid, radii in by_region.items():
            reg = self.region(rid).disk
            if pack_spheres(reg.center, reg.radius, radii) is None:
                raise ValueError(f"initial entities do not fit in region {rid}")


def entities(scenario, ag):
    """One entity per non-grasping robot, per ungrasped object, and per
    (object, coalition) pair; robots first, then objects, by id."""
    out = []
    grasping = ag.grasping_robots()
    for i, spec in scenario.robots.items():
        if i not in grasping:
            out.append(Entity("robot", frozenset({i}), None, spec.radius))
    for j, spec in scenario.objects.items():
        coal = ag.coalition(j)
        if not coal:
            out.append(Entity("object", frozenset(), j, spec.radius))
        else:
            r = coupled_radius(spec, [scenario.robots[i] for i in coal])
            out.append(Entity("system", coal, j, r))
    return out


def coupled_radius(obj, coalition):
    """Covering-ball radius of an object grasped on its boundary."""
    rmax = max((r.radius for r in coalition), default=0.0)
    return obj.radius + 2.0 * rmax


def lambda_check(obj, coalition):
    """Power predicate: can this coalition transport the object?"""
    return sum(r.power for r in coalition) >= obj.required_power


def pack_spheres(center, radius, radii, pad=1e-9):
    """Deterministic greedy packing of balls into a disk region.

    Returns positions aligned with ``radii`` (largest ball at the region
    center, the rest on concentric rings swept by angle), or None when the
    greedy scheme finds no spot.  Sound but incomplete.
    """
    n = len(radii)
    if n == 0:
        return []
    if any(r < 0 for r in radii):
        raise ValueError("negative radius")
    order = sorted(range(n), key=lambda i: (-radii[i], i))
    big = order[0]
    if radii[big] > radius:
        return None
    pos = [None] * n
    pos[big] = (center[0], center[1])
    placed = [(pos[big], radii[big])]
    for idx in order[1:]:
        p = place_ball(center, radius, placed, radii[idx], pad)
        if p is None:
            return None
        pos[idx] = p
        placed.append((p, radii[idx]))
    return pos


def place_ball(center, radius, placed, r, pad=1e-9, rings=64, angles=128):
    """Deterministic spot for one extra ball among already placed ones.

    Sweeps concentric rings outward, angles counterclockwise; returns the
    first position whose ball stays inside the region and clear of every
    placed ball (strictly, by ``pad``), or None.
    """
    room = radius - r
    if room < 0:
        return None
    for k in range(rings + 1):
        ring = room * k / rings
        steps = 1 if ring == 0 else angles
        for a in range(steps):
            th = 2.0 * math.pi * a / angles
            x = center[0] + ring * math.cos(th)
            y = center[1] + ring * math.sin(th)
            if math.hypot(x - center[0], y - center[1]) + r > radius:
                continue
            ok = True
            for (px, py), pr in placed:
                if math.hypot(x - px, y - py) < r + pr + pad:
                    ok = False
                    break
            if ok:
                return (x, y)
    return None


def label_regions(scenario, robot_regions, object_regions):
    """Atoms emitted by the given placement (union of the service tables)."""
    atoms = set()
    for i, rid in robot_regions.items():
        atoms |= scenario.region(rid).robot_atoms(i)
    for j, rid in object_regions.items():
        atoms |= scenario.region(rid).object_atoms(j)
    return frozenset(atoms)


def _services(d, key):
    out = []
    for ident, atoms in (d.get(key) or {}).items():
        out.append((int(ident), frozenset(atoms)))
    return tuple(sorted(out))


def load_scenario(source):
    """Build a Scenario from a JSON file path, file object or dict."""
    if isinstance(source, dict):
        d = source
    elif hasattr(source, "read"):
        d = json.load(source)
    else:
        with open(source) as fh:
            d = json.load(fh)

    ws = d["workspace"]
    workspace = Disk(float(ws["center"][0]), float(ws["center"][1]),
                     float(ws["radius"]))
    obstacles = [Disk(float(o["center"][0]), float(o["center"][1]),
                      float(o["radius"])) for o in d.get("obstacles", [])]
    regions = {}
    for r in d["regions"]:
        reg = Region(
            id=str(r["id"]),
            disk=Disk(float(r["center"][0]), float(r["center"][1]),
                      float(r["radius"])),
            robot_services=_services(r, "robot_services"),
            object_services=_services(r, "object_services"),
        )
        if reg.id in regions:
            raise ValueError(f"duplicate region id {reg.id!r}")
        regions[reg.id] = reg
    robots = {}
    for n, r in enumerate(d.get("robots", []), start=1):
        robots[n] = RobotSpec(
            id=n, radius=float(r["radius"]), power=int(r["power"]),
            mass=float(r["mass"]),
            friction=FrictionSpec.from_json(r.get("friction")),
            init_region=str(r["init_region"]),
        )
    objects = {}
    for n, o in enumerate(d.get("objects", []), start=1):
        objects[n] = ObjectSpec(
            id=n, radius=float(o["radius"]),
            required_power=int(o["required_power"]), mass=float(o["mass"]),
            friction=FrictionSpec.from_json(o.get("friction")),
            init_region=str(o["init_region"]),
        )
    sc = Scenario(workspace=workspace, obstacles=obstacles, regions=regions,
                  robots=robots, objects=objects,
                  name=str(d.get("name", "scenario")),
                  control=dict(d.get("control", {})))
    sc.validate()
    return sc


def friction_force(spec, x, v):
    """Friction term f(x, v) of the dynamics m·a = u − f."""
    if spec.kind == "none":
        return (0.0, 0.0)
    if spec.kind == "viscous":
        c = spec.param("c")
        return (c * v[0], c * v[1])
    if spec.kind == "sinusoidal":
        amp = spec.param("amp")
        freq = spec.param("freq")
        s = amp * math.sin(freq * (x[0] + x[1]))
        return (s * (math.exp(-abs(v[0])) + 1.0) * v[0],
                s * (math.exp(-abs(v[1])) + 1.0) * v[1])
    raise ValueError(f"unknown friction kind {spec.kind!r}")
