"""Coupled multi-robot-object transition system.

A discrete state fixes every robot's region, every object's region and the
grasp configuration.  Transitions are synchronized action sets — one atom
per robot, coalition members sharing their transport atom — constrained so
that nothing mixes grasp changes with motion within a single step, objects
move only when grasped by a sufficiently powerful coalition, and every
reached state packs geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .world import (
    EMPTY_GRASP,
    GraspConfig,
    coupled_radius,
    entities,
    label_regions,
    lambda_check,
    pack_spheres,
)

GRASP_EPS = 1e-6  # tie-break cost per grasp-status change


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TSState:
    robot_regions: tuple     # region id per robot, ordered by robot id
    object_regions: tuple    # region id per object, ordered by object id
    ag: GraspConfig

    def robot_region(self, i):
        return self.robot_regions[i - 1]

    def object_region(self, j):
        return self.object_regions[j - 1]


@dataclass(frozen=True)
class ActionAtom:
    kind: str                # stay | navigate | transport | grasp | release
    robots: frozenset        # the robots executing this atom
    object_id: int | None = None
    src: str | None = None
    dst: str | None = None

    def __post_init__(self):
        if self.kind in ("navigate", "transport") and self.src == self.dst:
            raise ValueError("motion atoms need distinct endpoints")

    def __str__(self):
        i = min(self.robots) if self.robots else "?"
        if self.kind == "stay":
            return f"stay({i})"
        if self.kind == "navigate":
            return f"{self.src} -{i}-> {self.dst}"
        if self.kind == "grasp":
            return f"{i} -g-> {self.object_id}"
        if self.kind == "release":
            return f"{i} -r-> {self.object_id}"
        coal = ",".join(map(str, sorted(self.robots)))
        return f"{self.src} -T{{{coal}}},{self.object_id}-> {self.dst}"


@dataclass(frozen=True)
class TSTransition:
    source: TSState
    target: TSState
    actions: frozenset
    cost: float

    def describe(self):
        acts = [a for a in self.actions if a.kind != "stay"]
        if not acts:
            return "-"
        return ", ".join(sorted(str(a) for a in acts))


def initial_state(scenario):
    return TSState(
        robot_regions=tuple(scenario.robots[i].init_region
                            for i in sorted(scenario.robots)),
        object_regions=tuple(scenario.objects[j].init_region
                             for j in sorted(scenario.objects)),
        ag=EMPTY_GRASP,
    )


def state_label(scenario, s):
    rr = {i: s.robot_region(i) for i in scenario.robots}
    oo = {j: s.object_region(j) for j in scenario.objects}
    return label_regions(scenario, rr, oo)


def state_valid(s, scenario, _pack_cache=None):
    """Def.-style validity: grasp co-location plus per-region packing."""
    for j, coal in s.ag.pairs:
        oreg = s.object_region(j)
        for i in coal:
            if s.robot_region(i) != oreg:
                return False
    by_region = {}
    for e in entities(scenario, s.ag):
        if e.kind == "robot":
            rid = s.robot_region(min(e.robots))
        else:
            rid = s.object_region(e.object_id)
        by_region.setdefault(rid, []).append(e.radius)
    for rid, radii in by_region.items():
        if not _region_packs(scenario, rid, radii, _pack_cache):
            return False
    return True


def _region_packs(scenario, rid, radii, cache):
    key = (rid, tuple(sorted(radii)))
    if cache is not None and key in cache:
        return cache[key]
    reg = scenario.region(rid).disk
    ok = pack_spheres(reg.center, reg.radius, radii) is not None
    if cache is not None:
        cache[key] = ok
    return ok


def transition_cost(actions, scenario):
    """Euclidean distance moved plus a tiny epsilon per grasp change."""
    cost = 0.0
    for a in actions:
        if a.kind in ("navigate", "transport"):
            ca = scenario.region(a.src).disk
            cb = scenario.region(a.dst).disk
            cost += math.hypot(ca.cx - cb.cx, ca.cy - cb.cy)
        elif a.kind in ("grasp", "release"):
            cost += GRASP_EPS
    return cost


def successors(s, scenario, _pack_cache=None):
    """All synchronized transitions out of ``s`` (the self-loop included)."""
    robots = sorted(scenario.robots)
    objects = sorted(scenario.objects)
    region_ids = scenario.region_ids

    # per-object transport options: None (no transport) or a destination
    obj_options = []
    for j in objects:
        opts = [None]
        coal = s.ag.coalition(j)
        if coal and lambda_check(scenario.objects[j],
                                 [scenario.robots[i] for i in coal]):
            src = s.object_region(j)
            opts += [dst for dst in region_ids if dst != src]
        obj_options.append(opts)

    out = []
    for combo in _product(obj_options):
        transported = {j: dst for j, dst in zip(objects, combo)
                       if dst is not None}
        fixed = {}       # robot -> shared transport atom
        for j, dst in transported.items():
            atom = ActionAtom("transport", s.ag.coalition(j), j,
                              s.object_region(j), dst)
            for i in s.ag.coalition(j):
                fixed[i] = atom

        robot_options = []
        for i in robots:
            if i in fixed:
                robot_options.append([fixed[i]])
                continue
            opts = [ActionAtom("stay", frozenset({i}))]
            held = s.ag.object_of(i)
            if held is None:
                here = s.robot_region(i)
                opts += [ActionAtom("navigate", frozenset({i}), None, here, dst)
                         for dst in region_ids if dst != here]
                for j in objects:
                    if j not in transported and s.object_region(j) == here:
                        opts.append(ActionAtom("grasp", frozenset({i}), j))
            elif held not in transported:
                opts.append(ActionAtom("release", frozenset({i}), held))
            robot_options.append(opts)

        for picks in _product(robot_options):
            t = _apply(s, robots, objects, picks, transported)
            if t is None or not state_valid(t, scenario, _pack_cache):
                continue
            actions = frozenset(picks)
            out.append(TSTransition(s, t, actions,
                                    transition_cost(actions, scenario)))
    return out


def _apply(s, robots, objects, picks, transported):
    """Target state of an action choice, or None if inapplicable."""
    rr = list(s.robot_regions)
    ag = {j: set(c) for j, c in s.ag.pairs}
    for i, a in zip(robots, picks):
        if a.kind == "navigate":
            rr[i - 1] = a.dst
        elif a.kind == "transport":
            rr[i - 1] = a.dst
        elif a.kind == "grasp":
            ag.setdefault(a.object_id, set()).add(i)
        elif a.kind == "release":
            ag[a.object_id].discard(i)
    oo = list(s.object_regions)
    for j, dst in transported.items():
        oo[j - 1] = dst
    return TSState(tuple(rr), tuple(oo), GraspConfig.of(ag))


def _product(options):
    if not options:
        yield ()
        return
    head, *rest = options
    for tail in _product(rest):
        for o in head:
            yield (o,) + tail


@dataclass
class TS:
    states: list             # discovery-ordered TSStates
    index: dict              # TSState -> id
    transitions: list        # TSTransitions
    initial: TSState

    @property
    def n_states(self):
        return len(self.states)

    def export_text(self):
        lines = [f"states: {self.n_states}", f"transitions: {len(self.transitions)}",
                 "state table:"]
        for n, st in enumerate(self.states):
            ag = ";".join(f"O{j}:{','.join(map(str, sorted(c)))}"
                          for j, c in st.ag.pairs) or "-"
            lines.append(f"  {n}: robots=({','.join(st.robot_regions)}) "
                         f"objects=({','.join(st.object_regions)}) grasps={ag}")
        lines.append("edges:")
        for t in self.transitions:
            lines.append(f"  {self.index[t.source]} -> {self.index[t.target]} : "
                         f"{t.cost:.6f} : {t.describe()}")
        return "\n".join(lines) + "\n"


def build_ts(scenario, max_states=100000):
    """Breadth-first closure of ``successors`` from the initial state."""
    s0 = initial_state(scenario)
    cache = {}
    if not state_valid(s0, scenario, cache):
        raise ValueError("initial state is not valid")
    states = [s0]
    index = {s0: 0}
    transitions = []
    frontier = [s0]
    while frontier:
        nxt = []
        for s in frontier:
            for t in successors(s, scenario, cache):
                transitions.append(t)
                if t.target not in index:
                    if len(states) >= max_states:
                        raise BudgetExceeded(
                            f"transition system exceeds {max_states} states")
                    index[t.target] = len(states)
                    states.append(t.target)
                    nxt.append(t.target)
        frontier = nxt
    return TS(states, index, transitions, s0)
