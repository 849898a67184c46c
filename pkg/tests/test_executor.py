import math

import pytest

from tempofleet.control.laws import (
    control_navigation,
    control_transport,
    integrate_step,
    validate_load_share,
)
from tempofleet.control.runner import ControlParams, simulate_motion
from tempofleet.executor import (
    execute_plan,
    serialize_transition,
    simulate_transport,
    verify_behavior,
)
from tempofleet.ltl import parse_ltl, to_nnf, translate
from tempofleet.product import exact_plan
from tempofleet.ts import ActionAtom, TSTransition
from tempofleet.world import FrictionSpec, load_scenario


def quick_params(**kw):
    base = dict(k1=0.5, k2=5.0, kphi=2.0, kv=2.0, dt=1e-3, timeout=60.0)
    base.update(kw)
    return ControlParams(**base)


def plan_for(scenario, text):
    f = to_nnf(parse_ltl(text, universe=scenario.atom_universe()))
    plan = exact_plan(scenario, translate(f))
    assert plan is not None
    return plan, f


class TestSerializeTransition:
    def test_phase_split_and_order(self):
        a_rel = ActionAtom("release", frozenset({2}), 1)
        a_nav = ActionAtom("navigate", frozenset({1}), None, "a", "b")
        a_tr = ActionAtom("transport", frozenset({3, 4}), 2, "a", "b")
        a_gr = ActionAtom("grasp", frozenset({5}), 3)
        a_stay = ActionAtom("stay", frozenset({6}))
        tr = TSTransition(None, None,
                          frozenset({a_rel, a_nav, a_tr, a_gr, a_stay}), 0.0)
        releases, motions, grasps = serialize_transition(tr)
        assert releases == [a_rel]
        assert grasps == [a_gr]
        assert motions == [a_nav, a_tr]   # ascending minimum robot id
        # stay atoms are not executed
        assert a_stay not in releases + motions + grasps


class TestExecutePlan:
    def test_single_robot_navigation(self):
        sc = load_scenario("scenarios/micro1.json")
        plan, f = plan_for(sc, 'F "1-π2"')
        rep = execute_plan(sc, plan, params=quick_params(), log_every=100)
        assert rep.success, rep.failure
        assert rep.sim_time > 0
        moves = [m for m in rep.motions if m.status == "arrived"]
        assert len(moves) == len(rep.motions) == 1
        x, y = moves[0].final
        assert math.hypot(x - 3.0, y - 0.0) + 0.3 <= 1.2
        assert verify_behavior(rep.behavior, f)
        assert rep.trails and rep.trails[0][0] == "R1"

    def test_grasp_and_transport(self):
        sc = load_scenario("scenarios/micro2.json")
        plan, f = plan_for(sc, 'F "O1-π2"')
        rep = execute_plan(sc, plan, params=quick_params())
        assert rep.success, rep.failure
        names = [m.entity for m in rep.motions]
        assert "T(O1|1)" in names
        assert verify_behavior(rep.behavior, f)

    def test_verify_rejects_wrong_task(self):
        sc = load_scenario("scenarios/micro1.json")
        plan, _ = plan_for(sc, 'F "1-π2"')
        rep = execute_plan(sc, plan, params=quick_params())
        assert rep.success, rep.failure
        other = to_nnf(parse_ltl('G "1-π1"', universe=sc.atom_universe()))
        assert not verify_behavior(rep.behavior, other)

    def test_timeout_fails_with_named_step(self):
        sc = load_scenario("scenarios/micro1.json")
        plan, _ = plan_for(sc, 'F "1-π2"')
        rep = execute_plan(sc, plan, params=quick_params(timeout=0.05))
        assert not rep.success
        assert rep.behavior is None
        assert "timeout" in rep.failure and "step" in rep.failure
        assert any(m.status == "timeout" for m in rep.motions)

    def test_report_roundtrip(self, tmp_path):
        sc = load_scenario("scenarios/micro1.json")
        plan, _ = plan_for(sc, 'F "1-π2"')
        rep = execute_plan(sc, plan, params=quick_params())
        out = tmp_path / "report.json"
        rep.export_json(out)
        import json
        d = json.loads(out.read_text())
        assert d["success"] is True
        assert d["motions"][0]["entity"] == "R1"
        assert d["behavior"]["cycle"]

    def test_deterministic(self):
        sc = load_scenario("scenarios/micro2.json")
        plan, _ = plan_for(sc, 'F "O1-π2"')
        reps = [execute_plan(sc, plan, params=quick_params()) for _ in range(2)]
        assert [m.as_dict() for m in reps[0].motions] \
            == [m.as_dict() for m in reps[1].motions]


class TestCooperativeTransport:
    def test_matches_virtual_entity(self):
        sc = load_scenario("scenarios/micro3.json")
        start = (-4.0, 0.0)
        goal = (4.0, 0.0)
        dst = sc.regions["π2"].disk
        res, forces = simulate_transport(
            sc, 1, {1, 2}, {1: 0.5, 2: 0.5}, start, goal, dst, [], ["π3"],
            params=quick_params(), log_every=50)
        assert res.ok
        virtual = simulate_motion(
            sc, 0.7, 2.25, FrictionSpec(), start, goal, dst, [], ["π3"],
            params=quick_params(), log_every=50)
        assert virtual.ok
        assert (res.x, res.y, res.vx, res.vy) \
            == (virtual.x, virtual.y, virtual.vx, virtual.vy)
        assert res.log == virtual.log
        # identical shares, summing back to the virtual-entity force exactly
        assert forces[1] == forces[2]
        for row, f1, f2 in zip(res.log, forces[1], forces[2]):
            assert f1[1] + f2[1] == row[5]
            assert f1[2] + f2[2] == row[6]

    def test_load_share_validation(self):
        with pytest.raises(ValueError):
            validate_load_share([0.5, 0.6])
        with pytest.raises(ValueError):
            validate_load_share([-0.1, 1.1])
        validate_load_share([0.25, 0.25, 0.5])


class TestLaws:
    def test_navigation_force_algebra(self):
        u = control_navigation((1.0, -2.0), (0.5, 0.5), (0.1, -0.1),
                               mhat=2.0, ahat=4.0, kphi=3.0, kv=1.0)
        kd = 1.0 + 1.5 * 4.0
        assert u == (-3.0 * 1.0 + 2.0 * 0.5 - kd * 0.1,
                     -3.0 * -2.0 + 2.0 * 0.5 - kd * -0.1)

    def test_transport_share_scales(self):
        assert control_transport(0.25, (8.0, -4.0)) == (2.0, -1.0)

    def test_integrate_step_rest_invariant(self):
        x, v = integrate_step((1.0, 2.0), (0.0, 0.0), (0.0, 0.0), 1.0,
                              FrictionSpec(), 0.01)
        assert x == (1.0, 2.0) and v == (0.0, 0.0)

    def test_integrate_step_ballistic(self):
        # constant force, frictionless, from rest: x(t) = ½ F t² exactly
        # (RK4 is exact on polynomials of this degree)
        x, v = (0.0, 0.0), (0.0, 0.0)
        F = (2.0, -1.0)
        dt = 1e-2
        for _ in range(100):
            x, v = integrate_step(x, v, F, 1.0, FrictionSpec(), dt)
        t = 1.0
        assert x[0] == pytest.approx(0.5 * F[0] * t * t, abs=1e-12)
        assert x[1] == pytest.approx(0.5 * F[1] * t * t, abs=1e-12)
        assert v == pytest.approx((F[0] * t, F[1] * t), abs=1e-12)

    def test_integrate_step_viscous_decay(self):
        fric = FrictionSpec.from_json({"kind": "viscous", "params": {"c": 2.0}})
        x, v = (0.0, 0.0), (1.0, 0.0)
        dt = 1e-3
        for _ in range(1000):
            x, v = integrate_step(x, v, (0.0, 0.0), 1.0, fric, dt)
        assert v[0] == pytest.approx(math.exp(-2.0), rel=1e-6)
