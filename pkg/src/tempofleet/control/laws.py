"""Reference control laws and a single integration step.

These are the algebraic building blocks of the motion kernels, exposed on
their own so they can be unit-tested and reused: the adaptive navigation
force, its load-shared transport split, and one RK4 step of the plant.
"""

from __future__ import annotations

from ..world import friction_force


def control_navigation(grad_w, vdot_d, e_v, mhat, ahat, kphi, kv):
    """Adaptive tracking force: −k_φ ∇φ + m̂ v̇_d − (k_v + 3/2 α̂) e_v.

    grad_w is the navigation-function gradient pulled back to world
    coordinates (Jᵀ∇φ); e_v = v − v_d.
    """
    kd = kv + 1.5 * ahat
    return (-kphi * grad_w[0] + mhat * vdot_d[0] - kd * e_v[0],
            -kphi * grad_w[1] + mhat * vdot_d[1] - kd * e_v[1])


def validate_load_share(cf):
    """Check load-sharing coefficients: nonnegative, summing to one."""
    if any(c < 0 for c in cf):
        raise ValueError("load-sharing coefficients must be nonnegative")
    if abs(sum(cf) - 1.0) > 1e-12:
        raise ValueError("load-sharing coefficients must sum to 1")


def control_transport(cf_l, total):
    """Robot ℓ's share of the coupled-system force: u_ℓ = cf_ℓ · u.

    With Σcf = 1 the shares sum back to the single-entity law exactly, so
    the coupled ball moves as if driven by one virtual entity.
    """
    return (cf_l * total[0], cf_l * total[1])


def integrate_step(x, v, u, mass, friction, dt):
    """One RK4 step of m·ẍ = u − f(x, ẋ) under a constant force u.

    x, v, u are 2-vectors (tuples); returns (x', v').
    """

    def acc(px, pv):
        fx, fy = friction_force(friction, px, pv)
        return ((u[0] - fx) / mass, (u[1] - fy) / mass)

    a1 = acc(x, v)
    x2 = (x[0] + 0.5 * dt * v[0], x[1] + 0.5 * dt * v[1])
    v2 = (v[0] + 0.5 * dt * a1[0], v[1] + 0.5 * dt * a1[1])
    a2 = acc(x2, v2)
    x3 = (x[0] + 0.5 * dt * v2[0], x[1] + 0.5 * dt * v2[1])
    v3 = (v[0] + 0.5 * dt * a2[0], v[1] + 0.5 * dt * a2[1])
    a3 = acc(x3, v3)
    x4 = (x[0] + dt * v3[0], x[1] + dt * v3[1])
    v4 = (v[0] + dt * a3[0], v[1] + dt * a3[1])
    a4 = acc(x4, v4)
    nx = (x[0] + dt / 6.0 * (v[0] + 2 * v2[0] + 2 * v3[0] + v4[0]),
          x[1] + dt / 6.0 * (v[1] + 2 * v2[1] + 2 * v3[1] + v4[1]))
    nv = (v[0] + dt / 6.0 * (a1[0] + 2 * a2[0] + 2 * a3[0] + a4[0]),
          v[1] + dt / 6.0 * (a1[1] + 2 * a2[1] + 2 * a3[1] + a4[1]))
    return nx, nv
