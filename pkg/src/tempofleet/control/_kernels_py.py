"""Pure-Python closed-loop motion kernel.

Self-contained hot loop: diffeomorphism to the point world, navigation
function gradient, adaptive tracking law, friction plant and RK4, all in
one module so the compiled kernel can mirror it statement for statement.
The public entry point is run_motion(prob); ``prob`` is a flat dict of
floats/lists prepared by the runner (see control.runner).

Status codes: 0 arrived, 1 timed out, 2 safety violation (left the free
space), 3 numerical divergence.
"""

from __future__ import annotations

import math

FD_DELTA = 1e-6
ADAPT_CAP = 100.0


def backend_name():
    return "python"


def _smoothstep(u):
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _smoothstep_d(u):
    return 30.0 * u * u * (1.0 - u) * (1.0 - u)


def _beta(s, tau):
    """(β, β') of the reciprocal quintic barrier at squared distance s."""
    if s >= tau:
        return 1.0, 0.0
    u = s / tau
    p = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    p1 = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    return 1.0 / p, -p1 / (tau * p * p)


class _Motion:
    """One motion problem unpacked into attributes for the inner loop."""

    def __init__(self, prob):
        self.cx = prob["cx"]
        self.cy = prob["cy"]
        self.scale = prob["scale"]
        self.bx = list(prob["bx"])
        self.by = list(prob["by"])
        self.rho = list(prob["rho"])
        self.w = list(prob["w"])
        self.n = len(self.bx)
        self.gx = prob["gx"]
        self.gy = prob["gy"]
        self.k1 = prob["k1"]
        self.k2 = prob["k2"]
        self.tau = prob["tau"]
        self.kphi = prob["kphi"]
        self.kv = prob["kv"]
        self.km = prob["km"]
        self.kalpha = prob["kalpha"]
        self.mass = prob["mass"]
        self.fric_kind = prob["fric_kind"]
        self.fric_a = prob["fric_a"]
        self.fric_b = prob["fric_b"]
        self.dst_x = prob["dst_x"]
        self.dst_y = prob["dst_y"]
        self.dst_r = prob["dst_r"]
        self.ent_r = prob["ent_r"]
        self.speed_tol = prob["speed_tol"]

    def clearance(self, x, y):
        """Distance to the nearest free-space boundary, world units."""
        cx = (x - self.cx) / self.scale
        cy = (y - self.cy) / self.scale
        c = 1.0 - math.hypot(cx, cy)
        for i in range(self.n):
            c = min(c, math.hypot(cx - self.bx[i], cy - self.by[i])
                    - self.rho[i])
        return c * self.scale

    def vdesired(self, x, y):
        """(vdx, vdy, gwx, gwy, ok): desired velocity −J⁻¹∇φ and the world
        gradient Jᵀ∇φ at position (x, y); ok=False when outside free space."""
        s = self.scale
        cx = (x - self.cx) / s
        cy = (y - self.cy) / s
        j00 = 1.0 / s
        j01 = 0.0
        j10 = 0.0
        j11 = 1.0 / s
        for i in range(self.n):
            dx = cx - self.bx[i]
            dy = cy - self.by[i]
            d = math.hypot(dx, dy)
            rho = self.rho[i]
            wi = self.w[i]
            if d >= rho + wi:
                continue
            if d <= rho:
                return 0.0, 0.0, 0.0, 0.0, False
            u = (rho + wi - d) / wi
            g = d - rho * _smoothstep(u)
            gp = 1.0 + (rho / wi) * _smoothstep_d(u)
            rx = dx / d
            ry = dy / d
            t = g / d
            a00 = t + (gp - t) * rx * rx
            a01 = (gp - t) * rx * ry
            a11 = t + (gp - t) * ry * ry
            cx = self.bx[i] + rx * g
            cy = self.by[i] + ry * g
            j00, j01, j10, j11 = (a00 * j00 + a01 * j10,
                                  a00 * j01 + a01 * j11,
                                  a01 * j00 + a11 * j10,
                                  a01 * j01 + a11 * j11)
            break  # purging annuli are disjoint: at most one map acts

        # navigation function gradient at χ = (cx, cy)
        px = 2.0 * self.k1 * (cx - self.gx)
        py = 2.0 * self.k1 * (cy - self.gy)
        d0 = 1.0 - (cx * cx + cy * cy)
        if d0 <= 0.0:
            return 0.0, 0.0, 0.0, 0.0, False
        _, b1 = _beta(d0, self.tau)
        px += self.k2 * b1 * (-2.0 * cx)
        py += self.k2 * b1 * (-2.0 * cy)
        for i in range(self.n):
            ex = cx - self.bx[i]
            ey = cy - self.by[i]
            dl = ex * ex + ey * ey
            if dl <= 0.0:
                return 0.0, 0.0, 0.0, 0.0, False
            _, b1 = _beta(dl, self.tau)
            px += self.k2 * b1 * 2.0 * ex
            py += self.k2 * b1 * 2.0 * ey

        det = j00 * j11 - j01 * j10
        if det == 0.0:
            return 0.0, 0.0, 0.0, 0.0, False
        vdx = -(j11 * px - j01 * py) / det
        vdy = -(-j10 * px + j00 * py) / det
        gwx = j00 * px + j10 * py
        gwy = j01 * px + j11 * py
        return vdx, vdy, gwx, gwy, True

    def friction(self, x, y, vx, vy):
        k = self.fric_kind
        if k == 1:
            return self.fric_a * vx, self.fric_a * vy
        if k == 2:
            s = self.fric_a * math.sin(self.fric_b * (x + y))
            return (s * (math.exp(-abs(vx)) + 1.0) * vx,
                    s * (math.exp(-abs(vy)) + 1.0) * vy)
        return 0.0, 0.0

    def deriv(self, x, y, vx, vy, mhat, ahat):
        """Closed-loop derivatives; None when outside the free space."""
        vdx, vdy, gwx, gwy, ok = self.vdesired(x, y)
        if not ok:
            return None
        # v̇_d by a directional difference along the current velocity
        vdx2, vdy2, _, _, ok = self.vdesired(x + FD_DELTA * vx,
                                             y + FD_DELTA * vy)
        if not ok:
            return None
        adx = (vdx2 - vdx) / FD_DELTA
        ady = (vdy2 - vdy) / FD_DELTA
        evx = vx - vdx
        evy = vy - vdy
        kd = self.kv + 1.5 * ahat
        ux = -self.kphi * gwx + mhat * adx - kd * evx
        uy = -self.kphi * gwy + mhat * ady - kd * evy
        fx, fy = self.friction(x, y, vx, vy)
        return (vx, vy,
                (ux - fx) / self.mass, (uy - fy) / self.mass,
                -self.km * (evx * adx + evy * ady),
                self.kalpha * (evx * evx + evy * evy),
                ux, uy)


def run_motion(prob, dt, t_max, log_every=0):
    """Integrate one point-to-region motion with RK4.

    Returns (status, t, x, y, vx, vy, mhat, ahat, log); log rows are
    (t, x, y, vx, vy, ux, uy, mhat, ahat, clearance), decimated to every
    ``log_every``-th step (0 disables logging; the final row is always
    appended when logging is on).
    """
    m = _Motion(prob)
    x = prob["x0"]
    y = prob["y0"]
    vx = prob["vx0"]
    vy = prob["vy0"]
    mhat = prob["mhat0"]
    ahat = prob["ahat0"]
    log = []
    n_steps = int(math.ceil(t_max / dt))
    status = 1
    t = 0.0
    step = 0
    while step <= n_steps:
        d = m.deriv(x, y, vx, vy, mhat, ahat)
        if d is None:
            status = 2
            break
        if log_every and step % log_every == 0:
            log.append((t, x, y, vx, vy, d[6], d[7], mhat, ahat,
                        m.clearance(x, y)))
        # arrival: entity ball inside the goal region, nearly at rest
        if (math.hypot(x - m.dst_x, y - m.dst_y) + m.ent_r <= m.dst_r
                and math.hypot(vx, vy) < m.speed_tol):
            status = 0
            break
        if step == n_steps:
            break
        h = dt
        d2 = m.deriv(x + 0.5 * h * d[0], y + 0.5 * h * d[1],
                     vx + 0.5 * h * d[2], vy + 0.5 * h * d[3],
                     mhat + 0.5 * h * d[4], ahat + 0.5 * h * d[5])
        if d2 is None:
            status = 2
            break
        d3 = m.deriv(x + 0.5 * h * d2[0], y + 0.5 * h * d2[1],
                     vx + 0.5 * h * d2[2], vy + 0.5 * h * d2[3],
                     mhat + 0.5 * h * d2[4], ahat + 0.5 * h * d2[5])
        if d3 is None:
            status = 2
            break
        d4 = m.deriv(x + h * d3[0], y + h * d3[1],
                     vx + h * d3[2], vy + h * d3[3],
                     mhat + h * d3[4], ahat + h * d3[5])
        if d4 is None:
            status = 2
            break
        x += h / 6.0 * (d[0] + 2.0 * d2[0] + 2.0 * d3[0] + d4[0])
        y += h / 6.0 * (d[1] + 2.0 * d2[1] + 2.0 * d3[1] + d4[1])
        vx += h / 6.0 * (d[2] + 2.0 * d2[2] + 2.0 * d3[2] + d4[2])
        vy += h / 6.0 * (d[3] + 2.0 * d2[3] + 2.0 * d3[3] + d4[3])
        mhat += h / 6.0 * (d[4] + 2.0 * d2[4] + 2.0 * d3[4] + d4[4])
        ahat += h / 6.0 * (d[5] + 2.0 * d2[5] + 2.0 * d3[5] + d4[5])
        if mhat < 0.0:
            mhat = 0.0
        elif mhat > ADAPT_CAP:
            mhat = ADAPT_CAP
        if ahat < 0.0:
            ahat = 0.0
        elif ahat > ADAPT_CAP:
            ahat = ADAPT_CAP
        if not (math.isfinite(x) and math.isfinite(y)
                and math.isfinite(vx) and math.isfinite(vy)):
            status = 3
            break
        step += 1
        t = step * dt
    if log_every and (not log or log[-1][0] != t):
        d = m.deriv(x, y, vx, vy, mhat, ahat)
        ux, uy = (d[6], d[7]) if d is not None else (0.0, 0.0)
        log.append((t, x, y, vx, vy, ux, uy, mhat, ahat, m.clearance(x, y)))
    return status, t, x, y, vx, vy, mhat, ahat, log
