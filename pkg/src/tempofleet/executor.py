"""Continuous execution of a discrete prefix-suffix plan.

Each synchronized plan step is serialized into micro-steps — releases
first, then one entity motion at a time, then grasps — so only one ball
ever moves while everything else is frozen.  Motion order is searched with
backtracking: if an entity cannot reach its goal (blocked start or goal,
simulation failure), the remaining orders are tried before giving up.
Grasps and releases are instantaneous but may relocate balls inside their
region, because coupling changes the covering radius.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import permutations

from .control.laws import control_transport, validate_load_share
from .control.runner import ControlParams, simulate_motion
from .ltl import LassoWord, eval_lasso
from .ts import state_label
from .world import (
    FrictionSpec,
    GraspConfig,
    coupled_radius,
    entities,
    pack_spheres,
    place_ball,
)

PAD_FRAC = 0.2      # placement clearance as a fraction of the placed radius


def _pad(radius):
    """Clearance around an instantaneous placement.

    Proportional to the placed ball so that starts and goals sit outside the
    steep zone of the neighbours' collision barriers at any workspace scale.
    """
    return PAD_FRAC * radius


class ExecutionError(RuntimeError):
    pass


@dataclass
class MotionRecord:
    step: int                # plan step index (1-based, suffix repeats count)
    action: str
    entity: str
    start: tuple
    goal: tuple
    status: str
    sim_time: float
    final: tuple
    adapt: dict | None = None     # estimator stats, present when logging

    def as_dict(self):
        return {"step": self.step, "action": self.action,
                "entity": self.entity, "start": list(self.start),
                "goal": list(self.goal), "status": self.status,
                "sim_time": self.sim_time, "final": list(self.final),
                "adapt": self.adapt}


@dataclass
class Behavior:
    """Discrete footprint of an execution: the visited states' labels."""

    prefix_letters: list
    cycle_letters: list

    def word(self):
        return LassoWord(tuple(self.prefix_letters),
                         tuple(self.cycle_letters))


@dataclass
class ExecutionReport:
    success: bool
    failure: str | None
    motions: list                 # MotionRecords
    behavior: Behavior | None
    sim_time: float
    suffix_reps: int
    trails: list = field(default_factory=list)  # (name, [(x, y), ...])

    def as_dict(self):
        return {
            "success": self.success,
            "failure": self.failure,
            "sim_time": self.sim_time,
            "suffix_reps": self.suffix_reps,
            "motions": [m.as_dict() for m in self.motions],
            "behavior": None if self.behavior is None else {
                "prefix": [sorted(a) for a in self.behavior.prefix_letters],
                "cycle": [sorted(a) for a in self.behavior.cycle_letters],
            },
        }

    def export_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)
            fh.write("\n")


def serialize_transition(tr):
    """(releases, motions, grasps): the micro-step phases of one step.

    Motions are returned in ascending entity order (minimum robot id, then
    transported object id); the executor may permute them when backtracking.
    """
    releases = sorted((a for a in tr.actions if a.kind == "release"),
                      key=lambda a: min(a.robots))
    grasps = sorted((a for a in tr.actions if a.kind == "grasp"),
                    key=lambda a: min(a.robots))
    motions = sorted((a for a in tr.actions
                      if a.kind in ("navigate", "transport")),
                     key=lambda a: (min(a.robots), a.object_id or 0))
    return releases, motions, grasps


class _Fleet:
    """Continuous positions of every ball, kept in sync with the grasp
    configuration of the current discrete state."""

    def __init__(self, scenario, state):
        self.scenario = scenario
        self.ag = state.ag
        self.robot_pos = {}
        self.object_pos = {}
        self.robot_region = {i: state.robot_region(i)
                             for i in scenario.robots}
        self.object_region = {j: state.object_region(j)
                              for j in scenario.objects}
        by_region = {}
        for e in entities(scenario, state.ag):
            rid = self._entity_region(e)
            by_region.setdefault(rid, []).append(e)
        for rid, es in by_region.items():
            disk = scenario.region(rid).disk
            radii = [e.radius for e in es]
            pos = pack_spheres(disk.center, disk.radius, radii,
                               pad=_pad(min(radii)))
            if pos is None:
                raise ExecutionError(f"cannot place entities in region {rid}")
            for e, p in zip(es, pos):
                self._set_entity_pos(e, p)

    def _entity_region(self, e):
        if e.kind == "robot":
            return self.robot_region[min(e.robots)]
        return self.object_region[e.object_id]

    def _set_entity_pos(self, e, p):
        for i in e.robots:
            self.robot_pos[i] = p
        if e.object_id is not None:
            self.object_pos[e.object_id] = p

    def entity_pos(self, e):
        if e.kind == "robot":
            return self.robot_pos[min(e.robots)]
        return self.object_pos[e.object_id]

    def snapshot(self):
        return (dict(self.robot_pos), dict(self.object_pos),
                dict(self.robot_region), dict(self.object_region), self.ag)

    def restore(self, snap):
        (self.robot_pos, self.object_pos,
         self.robot_region, self.object_region, self.ag) = \
            (dict(snap[0]), dict(snap[1]), dict(snap[2]), dict(snap[3]),
             snap[4])

    def frozen_disks(self, mover, skip_regions=()):
        """Static entity disks the mover must avoid.

        Entities inside ``skip_regions`` (the motion's own source and
        destination) are omitted: enlarged by the mover radius they would
        cover most of their region, making entry impossible; separation
        inside those regions is guaranteed by padded placement instead.
        """
        out = []
        for e in entities(self.scenario, self.ag):
            if e == mover or self._entity_region(e) in skip_regions:
                continue
            x, y = self.entity_pos(e)
            out.append((x, y, e.radius))
        return out

    def spot_for(self, rid, e):
        """Free position for entity ``e`` inside region ``rid``.

        Tries an incremental placement among the current occupants first;
        when that finds no room (an early occupant may sit where only the
        newcomer fits) the whole region is repacked jointly and the other
        occupants are relocated.
        """
        disk = self.scenario.region(rid).disk
        others = [o for o in entities(self.scenario, self.ag)
                  if o != e and self._entity_region(o) == rid]
        occ = [(self.entity_pos(o), o.radius) for o in others]
        p = place_ball(disk.center, disk.radius, occ, e.radius,
                       pad=_pad(e.radius))
        if p is not None:
            return p
        radii = [e.radius] + [o.radius for o in others]
        pos = pack_spheres(disk.center, disk.radius, radii,
                           pad=_pad(min(radii)))
        if pos is None:
            return None
        for o, q in zip(others, pos[1:]):
            self._set_entity_pos(o, q)
        return pos[0]

    def mover_for(self, action):
        """The entity realizing a motion atom in the current grasp config."""
        for e in entities(self.scenario, self.ag):
            if action.kind == "navigate" and e.kind == "robot" \
                    and e.robots == action.robots:
                return e
            if action.kind == "transport" and e.kind == "system" \
                    and e.object_id == action.object_id:
                return e
        raise ExecutionError(f"no entity realizes {action}")

    def apply_release(self, action):
        """Drop a robot from its coalition; re-place the freed balls."""
        i = min(action.robots)
        j = action.object_id
        rid = self.object_region[j]
        self.ag = self.ag.without(i)
        # the object (or shrunk system) keeps the old ball center; the
        # released robot gets a fresh spot among the region's occupants
        freed = None
        for e in entities(self.scenario, self.ag):
            if e.kind == "robot" and e.robots == frozenset({i}):
                freed = e
        p = self.spot_for(rid, freed)
        if p is None:
            raise ExecutionError(
                f"released robot {i} does not fit in region {rid}")
        self.robot_pos[i] = p

    def apply_grasp_group(self, j, new_robots):
        """Couple robots onto object ``j``; relocate the covering ball."""
        rid = self.object_region[j]
        for i in sorted(new_robots):
            self.ag = self.ag.with_grasp(i, j)
        system = None
        for e in entities(self.scenario, self.ag):
            if e.kind == "system" and e.object_id == j:
                system = e
        p = self.spot_for(rid, system)
        if p is None:
            raise ExecutionError(
                f"coupled ball for object {j} does not fit in region {rid}")
        self._set_entity_pos(system, p)

    def move_entity(self, e, dst_rid):
        for i in e.robots:
            self.robot_region[i] = dst_rid
        if e.object_id is not None:
            self.object_region[e.object_id] = dst_rid


def _mass_and_friction(scenario, e):
    """Plant parameters of one entity (members summed for a coupled ball)."""
    if e.kind == "robot":
        spec = scenario.robots[min(e.robots)]
        return spec.mass, spec.friction
    specs = [scenario.objects[e.object_id]]
    specs += [scenario.robots[i] for i in sorted(e.robots)]
    mass = sum(s.mass for s in specs)
    kinds = {s.friction.kind for s in specs if s.friction.kind != "none"}
    if not kinds:
        return mass, FrictionSpec()
    if len(kinds) > 1:
        raise ExecutionError("coupled entities mix friction kinds")
    kind = kinds.pop()
    active = [s.friction for s in specs if s.friction.kind == kind]
    if kind == "viscous":
        params = {"c": sum(f.param("c") for f in active)}
    else:
        freqs = {f.param("freq") for f in active}
        if len(freqs) > 1:
            raise ExecutionError("coupled entities mix friction frequencies")
        params = {"amp": sum(f.param("amp") for f in active),
                  "freq": freqs.pop()}
    return mass, FrictionSpec.from_json({"kind": kind, "params": params})


def simulate_transport(scenario, object_id, coalition, cf, start, goal,
                       dst_disk, frozen_disks, excluded_region_ids,
                       params=None, log_every=0):
    """Coupled transport as one virtual entity plus per-robot force shares.

    cf maps robot id -> load-sharing coefficient (nonnegative, summing to
    one).  Returns (MotionResult of the coupled ball, {robot: force rows});
    force rows are (t, ux, uy) with Σ over robots equal to the virtual
    entity's force at every logged step.
    """
    coalition = sorted(coalition)
    validate_load_share([cf[i] for i in coalition])
    obj = scenario.objects[object_id]
    robots = [scenario.robots[i] for i in coalition]
    radius = coupled_radius(obj, robots)
    system = None
    for e in entities(scenario, GraspConfig.of({object_id: set(coalition)})):
        if e.kind == "system":
            system = e
    mass, friction = _mass_and_friction(scenario, system)
    res = simulate_motion(scenario, radius, mass, friction, start, goal,
                          dst_disk, frozen_disks, excluded_region_ids,
                          params=params, log_every=log_every)
    forces = {i: [(row[0],) + control_transport(cf[i], (row[5], row[6]))
                  for row in res.log]
              for i in coalition}
    return res, forces


def execute_plan(scenario, plan, params=None, suffix_reps=2, log_every=0,
                 max_orders=24):
    """Simulate the plan: prefix once, suffix ``suffix_reps`` times.

    Returns an ExecutionReport; success requires every motion to arrive.
    """
    p = params or ControlParams.from_scenario(scenario)
    start_state = (plan.prefix[0].source if plan.prefix
                   else plan.suffix[0].source)
    fleet = _Fleet(scenario, start_state)
    motions = []
    trails = {}
    sim_time = 0.0
    region_ids = list(scenario.regions)

    def run_one(action, step_idx):
        nonlocal sim_time
        mover = fleet.mover_for(action)
        start = fleet.entity_pos(mover)
        dst_disk = scenario.region(action.dst).disk
        goal = fleet.spot_for(action.dst, mover)
        if goal is None:
            return None, f"no free spot for {mover.name} in {action.dst}"
        excluded = [r for r in region_ids
                    if r not in (action.src, action.dst)]
        try:
            if mover.kind == "system":
                cf = {i: 1.0 / len(mover.robots) for i in mover.robots}
                res, _ = simulate_transport(
                    scenario, mover.object_id, mover.robots, cf, start,
                    goal, dst_disk, fleet.frozen_disks(mover, (action.src, action.dst)), excluded,
                    params=p, log_every=log_every)
            else:
                mass, friction = _mass_and_friction(scenario, mover)
                res = simulate_motion(scenario, mover.radius, mass, friction,
                                      start, goal, dst_disk,
                                      fleet.frozen_disks(mover, (action.src, action.dst)), excluded,
                                      params=p, log_every=log_every)
        except ValueError as exc:
            return None, f"{mover.name}: {exc}"
        rec = MotionRecord(step_idx, str(action), mover.name, start, goal,
                           res.status_name, res.t, (res.x, res.y))
        if log_every and res.log:
            ahats = [row[8] for row in res.log]
            rec.adapt = {
                "ahat_monotone": all(b >= a for a, b in zip(ahats, ahats[1:])),
                "ahat_max": max(ahats),
                "mhat_max": max(row[7] for row in res.log),
                "min_clearance": min(row[9] for row in res.log),
            }
        if not res.ok:
            return rec, f"{mover.name}: motion ended with {res.status_name}"
        sim_time += res.t
        if log_every:
            trails.setdefault(mover.name, []).extend(
                (row[1], row[2]) for row in res.log)
        fleet._set_entity_pos(mover, (res.x, res.y))
        fleet.move_entity(mover, action.dst)
        return rec, None

    def run_motion_phase(phase, step_idx):
        """Try motion orders until one fully succeeds; True on success."""
        base = fleet.snapshot()
        n_before = len(motions)
        last_error = None
        for n, order in enumerate(permutations(phase)):
            if n >= max_orders:
                break
            fleet.restore(base)
            del motions[n_before:]
            ok = True
            for action in order:
                rec, err = run_one(action, step_idx)
                if rec is not None:
                    motions.append(rec)
                if err is not None:
                    last_error = err
                    ok = False
                    break
            if ok:
                return None
        return last_error or "no motions to run"

    chain = list(plan.prefix)
    for _ in range(suffix_reps):
        chain += list(plan.suffix)

    failure = None
    for step_idx, tr in enumerate(chain, start=1):
        releases, phase, grasps = serialize_transition(tr)
        try:
            for a in releases:
                fleet.apply_release(a)
            failure = run_motion_phase(phase, step_idx)
            if failure is not None:
                failure = f"step {step_idx}: {failure}"
                break
            by_object = {}
            for a in grasps:
                by_object.setdefault(a.object_id, set()).add(min(a.robots))
            for j in sorted(by_object):
                fleet.apply_grasp_group(j, by_object[j])
        except ExecutionError as exc:
            failure = f"step {step_idx}: {exc}"
            break
        fleet.ag = tr.target.ag   # reconcile (no-op when phases agree)

    behavior = None
    if failure is None:
        behavior = Behavior(
            [state_label(scenario, s) for s in plan.prefix_states()[:-1]],
            [state_label(scenario, s) for s in plan.suffix_states()])
    return ExecutionReport(
        success=failure is None, failure=failure, motions=motions,
        behavior=behavior, sim_time=sim_time, suffix_reps=suffix_reps,
        trails=sorted(trails.items()))


def verify_behavior(behavior, formula_nnf):
    """Direct-semantics check of the executed footprint against the task."""
    return eval_lasso(formula_nnf, behavior.word())
