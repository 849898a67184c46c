import itertools
import math
import pathlib

import pytest

from tempofleet.ts import (
    GRASP_EPS,
    ActionAtom,
    TSState,
    TSTransition,
    build_ts,
    initial_state,
    state_label,
    state_valid,
    successors,
    transition_cost,
)
from tempofleet.world import EMPTY_GRASP, GraspConfig, lambda_check, load_scenario

SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def scen(name):
    return load_scenario(SCENARIOS / f"{name}.json")


# ---------------------------------------------------------------------------
# Brute-force oracle: enumerate every (regions x grasp-config) tuple, filter
# by validity, and decide each ordered state pair directly from the
# synchronization clauses.  Written against the rules, not the implementation.

def all_grasp_configs(robot_ids, object_ids):
    configs = []
    for assignment in itertools.product([None] + list(object_ids),
                                        repeat=len(robot_ids)):
        d = {}
        for i, j in zip(robot_ids, assignment):
            if j is not None:
                d.setdefault(j, set()).add(i)
        configs.append(GraspConfig.of(d))
    return sorted(set(configs), key=str)


def all_valid_states(scenario):
    rids = sorted(scenario.robots)
    oids = sorted(scenario.objects)
    regions = scenario.region_ids
    out = []
    for rr in itertools.product(regions, repeat=len(rids)):
        for oo in itertools.product(regions, repeat=len(oids)):
            for ag in all_grasp_configs(rids, oids):
                s = TSState(rr, oo, ag)
                if state_valid(s, scenario):
                    out.append(s)
    return out


def derive_actions(s, t, scenario):
    """Unique action set carrying s to t, or None if the clauses forbid it."""
    robots = sorted(scenario.robots)
    objects = sorted(scenario.objects)
    atoms = {}

    moved = {j for j in objects if s.object_region(j) != t.object_region(j)}
    for j in moved:
        coal = s.ag.coalition(j)
        # (d) objects move only while grasped, (b) no grasp change on a
        # transported object, (e) the coalition must be powerful enough
        if not coal or t.ag.coalition(j) != coal:
            return None
        if not lambda_check(scenario.objects[j],
                            [scenario.robots[i] for i in coal]):
            return None
        atom = ActionAtom("transport", coal, j,
                          s.object_region(j), t.object_region(j))
        for i in coal:
            if (s.robot_region(i) != s.object_region(j)
                    or t.robot_region(i) != t.object_region(j)):
                return None
            atoms[i] = atom

    for i in robots:
        if i in atoms:
            continue
        held_s, held_t = s.ag.object_of(i), t.ag.object_of(i)
        region_changed = s.robot_region(i) != t.robot_region(i)
        if held_s == held_t:
            if not region_changed:
                atoms[i] = ActionAtom("stay", frozenset({i}))
            elif held_s is None:
                atoms[i] = ActionAtom("navigate", frozenset({i}), None,
                                      s.robot_region(i), t.robot_region(i))
            else:
                return None  # grasping robot cannot navigate alone
        else:
            if region_changed:
                return None  # (a) no grasp change combined with motion
            if held_s is not None and held_t is not None:
                return None  # (c) no simultaneous grasp and release
            j = held_t if held_t is not None else held_s
            if j in moved:
                return None  # (b)
            if held_t is not None:  # grasp
                if s.robot_region(i) != s.object_region(j):
                    return None
                atoms[i] = ActionAtom("grasp", frozenset({i}), j)
            else:
                atoms[i] = ActionAtom("release", frozenset({i}), j)

    # any other grasp-set difference is unreachable by per-robot atoms
    for j in objects:
        expect = set(s.ag.coalition(j))
        for i in robots:
            a = atoms[i]
            if a.kind == "grasp" and a.object_id == j:
                expect.add(i)
            if a.kind == "release" and a.object_id == j:
                expect.discard(i)
        if frozenset(expect) != t.ag.coalition(j):
            return None
    return frozenset(atoms.values())


def oracle_graph(scenario):
    states = all_valid_states(scenario)
    edges = set()
    for s in states:
        for t in states:
            acts = derive_actions(s, t, scenario)
            if acts is not None:
                edges.add((s, t, acts))
    # restrict to the part reachable from the initial state
    s0 = initial_state(scenario)
    reach = {s0}
    frontier = [s0]
    while frontier:
        s = frontier.pop()
        for (a, b, _) in edges:
            if a == s and b not in reach:
                reach.add(b)
                frontier.append(b)
    edges = {(s, t, a) for (s, t, a) in edges if s in reach}
    return reach, edges


def compare_with_oracle(scenario):
    reach, edges = oracle_graph(scenario)
    ts = build_ts(scenario)
    assert set(ts.states) == reach
    built = {(t.source, t.target, t.actions) for t in ts.transitions}
    assert built == edges
    for t in ts.transitions:
        assert t.cost == pytest.approx(transition_cost(t.actions, scenario))
    return ts


# ---------------------------------------------------------------------------

class TestValidity:
    def test_initial_states_valid(self):
        for name in ("micro1", "micro2", "micro3", "case1"):
            sc = scen(name)
            assert state_valid(initial_state(sc), sc)

    def test_colocation_violated(self):
        sc = scen("micro2")
        s = TSState(("π1",), ("π2",), GraspConfig.of({1: {1}}))
        assert not state_valid(s, sc)

    def test_packing_violated(self):
        d = {
            "workspace": {"center": [0, 0], "radius": 50},
            "regions": [
                {"id": "π1", "center": [-10, 0], "radius": 4},
                {"id": "π2", "center": [10, 0], "radius": 4},
            ],
            "robots": [{"radius": 2.0, "power": 1, "mass": 1,
                        "init_region": "π1"},
                       {"radius": 2.0, "power": 1, "mass": 1,
                        "init_region": "π2"}],
            "objects": [],
        }
        sc = load_scenario(d)
        crowded = TSState(("π1", "π1"), (), EMPTY_GRASP)
        # two radius-2 balls cannot sit disjointly inside a radius-4 disk
        # under the greedy center-first packing
        assert not state_valid(crowded, sc)


class TestSuccessors:
    def test_micro1_moves(self):
        sc = scen("micro1")
        succ = successors(initial_state(sc), sc)
        kinds = sorted(t.describe() for t in succ)
        assert kinds == ["-", "π1 -1-> π2"]

    def test_grasp_offered_when_colocated(self):
        sc = scen("micro2")
        succ = successors(initial_state(sc), sc)
        assert any(a.kind == "grasp" for t in succ for a in t.actions)
        assert not any(a.kind == "transport" for t in succ for a in t.actions)

    def test_case1_transport_by_coalition(self):
        sc = scen("case1")
        s = TSState(("π1", "π3", "π1"), ("π2", "π1"), GraspConfig.of({2: {1, 3}}))
        assert state_valid(s, sc)
        moves = {str(a) for t in successors(s, sc) for a in t.actions
                 if a.kind == "transport"}
        assert "π1 -T{1,3},2-> π4" in moves

    def test_closure(self):
        sc = scen("micro3")
        for t in successors(initial_state(sc), sc):
            assert state_valid(t.target, sc)
            assert derive_actions(t.source, t.target, sc) == t.actions


class TestCost:
    def test_all_stay_zero(self):
        sc = scen("micro1")
        stay = frozenset({ActionAtom("stay", frozenset({1}))})
        assert transition_cost(stay, sc) == 0.0

    def test_case1_distance(self):
        sc = scen("case1")
        nav = frozenset({ActionAtom("navigate", frozenset({1}), None, "π1", "π2")})
        assert transition_cost(nav, sc) == pytest.approx(math.hypot(12, 120))

    def test_two_movers_double(self):
        sc = scen("case1")
        nav = frozenset({
            ActionAtom("navigate", frozenset({1}), None, "π1", "π2"),
            ActionAtom("navigate", frozenset({2}), None, "π1", "π2"),
        })
        assert transition_cost(nav, sc) == pytest.approx(2 * math.hypot(12, 120))

    def test_grasp_epsilon(self):
        sc = scen("micro2")
        g = frozenset({ActionAtom("grasp", frozenset({1}), 1)})
        assert transition_cost(g, sc) == pytest.approx(GRASP_EPS)


class TestBuildTS:
    def test_micro1_counts(self):
        ts = build_ts(scen("micro1"))
        assert ts.n_states == 2
        assert len(ts.transitions) == 4

    def test_micro1_oracle(self):
        compare_with_oracle(scen("micro1"))

    def test_micro2_oracle(self):
        compare_with_oracle(scen("micro2"))

    def test_micro3_oracle(self):
        compare_with_oracle(scen("micro3"))

    def test_deterministic(self):
        sc = scen("micro3")
        a = build_ts(sc)
        b = build_ts(sc)
        assert a.states == b.states
        assert [(t.source, t.target, t.actions) for t in a.transitions] \
            == [(t.source, t.target, t.actions) for t in b.transitions]

    def test_budget(self):
        from tempofleet.ts import BudgetExceeded
        with pytest.raises(BudgetExceeded):
            build_ts(scen("micro3"), max_states=3)

    def test_export(self):
        ts = build_ts(scen("micro1"))
        text = ts.export_text()
        assert "states: 2" in text and "edges:" in text

    def test_symmetry_identical_robots(self):
        d = {
            "workspace": {"center": [0, 0], "radius": 12},
            "regions": [
                {"id": "π1", "center": [-3, 0], "radius": 1.2},
                {"id": "π2", "center": [3, 0], "radius": 1.2},
            ],
            "robots": [
                {"radius": 0.3, "power": 1, "mass": 1, "init_region": "π1"},
                {"radius": 0.3, "power": 1, "mass": 1, "init_region": "π1"},
            ],
            "objects": [],
        }
        sc = load_scenario(d)
        ts = build_ts(sc)

        def swap_state(s):
            return TSState((s.robot_regions[1], s.robot_regions[0]),
                           s.object_regions, s.ag)

        # the robot-swap permutation is an automorphism of the graph
        states = set(ts.states)
        assert {swap_state(s) for s in states} == states
        edges = {(t.source, t.target, t.cost) for t in ts.transitions}
        assert {(swap_state(a), swap_state(b), c) for (a, b, c) in edges} == edges


class TestLabels:
    def test_initial_label(self):
        sc = scen("case1")
        assert state_label(sc, initial_state(sc)) == \
            {"1-π1", "2-π3", "3-π4", "O1-π2", "O2-π1"}
