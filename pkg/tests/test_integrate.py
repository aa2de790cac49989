"""Adaptive integration, constraint handling, and drift diagnostics."""

import numpy as np
import pytest

from twocenter import (
    EllipsoidState,
    IntegratorConfig,
    InvalidInputError,
    NearCollisionError,
    PhasePoint,
    Problem,
    StarMetric,
    Trajectory,
    cubic_hermite,
    drift_report,
    ellipsoid_state_at,
    integrate_ellipsoid,
    integrate_planar,
    lift_velocity,
    star_norm,
)

EQUAL = Problem(1.0, 1.0, 1.0)
DEFAULT_START = PhasePoint(np.array([0.0, 2.0, 0.0]), np.array([0.3, 0.0, 0.6]))


def test_free_motion_is_linear():
    free = Problem(0.0, 0.0, 1.0)
    start = PhasePoint(np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]))
    traj = integrate_planar(start, free, 1.0)
    assert traj.status == "ok"
    assert np.allclose(traj.states[-1, :3], [1.0, 1.0, 0.0], atol=1e-12)
    assert np.allclose(traj.states[-1, 3:], [1.0, 0.0, 0.0], atol=1e-12)


def test_default_orbit_drift():
    traj = integrate_planar(DEFAULT_START, EQUAL, 10.0)
    report = drift_report(traj)
    assert traj.status == "ok"
    for name in ("J", "Theta", "E"):
        assert report.drifts[name] <= 1e-8


def test_start_at_center_raises():
    with pytest.raises(NearCollisionError):
        integrate_planar(PhasePoint(np.array([1.0, 0.0, 0.0]), np.zeros(3)), EQUAL, 1.0)


def test_collision_abort_returns_partial_trajectory():
    # released at rest between the centers, slightly closer to the plus one
    infall = PhasePoint(np.array([0.5, 0.0, 0.0]), np.zeros(3))
    traj = integrate_planar(infall, EQUAL, 10.0, IntegratorConfig(min_center_distance=0.01))
    assert traj.status == "collision"
    assert len(traj) > 1
    assert traj.times[-1] < 10.0


def test_invalid_horizons():
    with pytest.raises(InvalidInputError):
        integrate_planar(DEFAULT_START, EQUAL, 0.0)
    state = lift_velocity(DEFAULT_START.q, DEFAULT_START.p, StarMetric(1.0))
    with pytest.raises(InvalidInputError):
        integrate_ellipsoid(state, EQUAL, -1.0)


def test_fifth_order_convergence():
    """Forced constant steps via huge tolerances; error ratio ~ 2^5."""
    ref = integrate_planar(DEFAULT_START, EQUAL, 1.0, IntegratorConfig(rel_tol=1e-14, abs_tol=1e-14))
    errors = []
    for h in (0.2, 0.1):
        cfg = IntegratorConfig(rel_tol=10.0, abs_tol=10.0, max_step=h)
        traj = integrate_planar(DEFAULT_START, EQUAL, 1.0, cfg)
        assert np.allclose(np.diff(traj.times), h, atol=1e-12)
        errors.append(np.max(np.abs(traj.states[-1] - ref.states[-1])))
    assert 24.0 <= errors[0] / errors[1] <= 45.0


def test_reversibility():
    fwd = integrate_planar(DEFAULT_START, EQUAL, 10.0)
    flipped = PhasePoint(fwd.states[-1, :3], -fwd.states[-1, 3:])
    back = integrate_planar(flipped, EQUAL, 10.0)
    assert np.max(np.abs(back.states[-1, :3] - DEFAULT_START.q)) <= 1e-8
    assert np.max(np.abs(back.states[-1, 3:] + DEFAULT_START.p)) <= 1e-8


def test_tolerance_scaling_improves_accuracy():
    ref = integrate_planar(DEFAULT_START, EQUAL, 5.0, IntegratorConfig(rel_tol=1e-14, abs_tol=1e-14))
    errs = []
    for tol in (1e-6, 1e-9):
        traj = integrate_planar(DEFAULT_START, EQUAL, 5.0, IntegratorConfig(rel_tol=tol, abs_tol=tol))
        errs.append(np.max(np.abs(traj.states[-1] - ref.states[-1])))
    assert errs[1] < errs[0] * 1e-1


def test_ellipsoid_equilibrium():
    metric = StarMetric(1.0)
    state = lift_velocity(np.zeros(3), np.zeros(3), metric)
    traj = integrate_ellipsoid(state, EQUAL, 5.0)
    assert traj.status == "ok"
    assert np.max(np.abs(traj.states - traj.states[0])) <= 1e-12


def test_free_flow_conserves_speed_and_matches_closed_form():
    """m = 0 gives star-circular motion Q0 cos(w tau) + (Q'0/w) sin(w tau)."""
    metric = StarMetric(1.0)
    free = Problem(0.0, 0.0, 1.0)
    state = lift_velocity(np.array([0.3, 1.0, -0.2]), np.array([0.4, -0.1, 0.5]), metric)
    traj = integrate_ellipsoid(state, free, 10.0)
    assert traj.status == "ok"
    speeds = star_norm(traj.states[:, 4:], metric)
    assert np.max(np.abs(speeds - speeds[0])) <= 1e-10
    omega = float(speeds[0])
    q0, qp0 = state.point.vec, state.velocity
    tau = traj.times[-1]
    closed = q0 * np.cos(omega * tau) + (qp0 / omega) * np.sin(omega * tau)
    assert np.max(np.abs(traj.states[-1, :4] - closed)) <= 1e-9


def test_lifted_orbit_constraints_and_energy():
    state = lift_velocity(DEFAULT_START.q, DEFAULT_START.p, StarMetric(1.0))
    traj = integrate_ellipsoid(state, EQUAL, 5.0)
    assert traj.status == "ok"
    g = traj.diagnostics["G"]
    assert np.max(np.abs(g - g[0])) <= 1e-8
    assert np.max(traj.diagnostics["norm_residual"]) <= 1e-9
    assert np.max(traj.diagnostics["tangency_residual"]) <= 1e-9


def test_renormalization_off_still_ok_short_horizon():
    state = lift_velocity(DEFAULT_START.q, DEFAULT_START.p, StarMetric(1.0))
    cfg = IntegratorConfig(renormalize_constraint=False)
    traj = integrate_ellipsoid(state, EQUAL, 2.0, cfg)
    assert traj.status == "ok"
    assert np.max(traj.diagnostics["norm_residual"]) <= 1e-9


def test_integrity_abort_on_loose_unrenormalized_run():
    state = lift_velocity(DEFAULT_START.q, DEFAULT_START.p, StarMetric(1.0))
    cfg = IntegratorConfig(rel_tol=1e-3, abs_tol=1e-3, renormalize_constraint=False, max_step=0.5)
    traj = integrate_ellipsoid(state, EQUAL, 50.0, cfg)
    assert traj.status == "integrity"
    assert traj.times[-1] < 50.0


def test_rejected_steps_are_counted():
    cfg = IntegratorConfig(rel_tol=1e-6, abs_tol=1e-6, max_step=5.0)
    traj = integrate_planar(DEFAULT_START, EQUAL, 20.0, cfg)
    assert traj.status == "ok"
    assert traj.rejected_steps > 0


def test_intrinsic_infall_aborts_cleanly():
    # falling toward the projected center ray: the run must stop with a
    # partial trajectory, whether the guard or the step floor fires first
    metric = StarMetric(1.0)
    state = lift_velocity(np.array([0.5, 0.0, 0.0]), np.zeros(3), metric)
    traj = integrate_ellipsoid(state, EQUAL, 10.0)
    assert traj.status in ("collision", "step_underflow")
    assert 0.0 < traj.times[-1] < 10.0


def test_general_a_energy_rate_vanishes():
    """dG/dtau by finite differences along route B, for a in {1/2, 1, 2}."""
    for a in (0.5, 1.0, 2.0):
        prob = Problem(1.0, 1.0, a)
        state = lift_velocity(DEFAULT_START.q, DEFAULT_START.p, StarMetric(a))
        traj = integrate_ellipsoid(state, prob, 5.0)
        rate = np.abs(np.diff(traj.diagnostics["G"]) / np.diff(traj.times))
        assert np.max(rate) <= 1e-8


def test_ellipsoid_state_at_roundtrip():
    state = lift_velocity(DEFAULT_START.q, DEFAULT_START.p, StarMetric(1.0))
    traj = integrate_ellipsoid(state, EQUAL, 1.0)
    again = ellipsoid_state_at(traj, -1)
    assert isinstance(again, EllipsoidState)


def test_drift_report_examples():
    times = np.array([0.0, 1.0])
    states = np.zeros((2, 6))
    constant = Trajectory(times, states, {"J": np.array([2.5, 2.5])}, EQUAL, "planar")
    assert drift_report(constant).drifts["J"] == 0.0
    tiny = Trajectory(times, states, {"J": np.array([1.0, 1.0 + 1e-9])}, EQUAL, "planar")
    assert drift_report(tiny).drifts["J"] == pytest.approx(1e-9, rel=1e-6)
    assert any("1e-09" in line or "1.0" in line for line in drift_report(tiny).lines())


def test_trajectory_validation():
    with pytest.raises(InvalidInputError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 6)), {}, EQUAL, "planar")
    with pytest.raises(InvalidInputError):
        Trajectory(np.array([0.0, 1.0]), np.zeros((3, 6)), {}, EQUAL, "planar")
    with pytest.raises(InvalidInputError):
        Trajectory(np.array([0.0, 1.0]), np.zeros((2, 6)), {"J": np.zeros(3)}, EQUAL, "planar")
    with pytest.raises(InvalidInputError):
        Trajectory(np.array([0.0, 1.0]), np.zeros((2, 6)), {}, EQUAL, "sideways")


def test_config_validation():
    with pytest.raises(InvalidInputError):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(InvalidInputError):
        IntegratorConfig(max_step=-0.1)


def test_cubic_hermite_reproduces_cubics():
    ts = np.linspace(0.0, 2.0, 9)
    ys = (ts**3 - 2 * ts**2 + ts)[:, None]
    dys = (3 * ts**2 - 4 * ts + 1)[:, None]
    queries = np.linspace(0.0, 2.0, 101)
    exact = (queries**3 - 2 * queries**2 + queries)[:, None]
    assert np.max(np.abs(cubic_hermite(ts, ys, dys, queries) - exact)) <= 1e-13
    with pytest.raises(InvalidInputError):
        cubic_hermite(ts, ys, dys, np.array([2.5]))
