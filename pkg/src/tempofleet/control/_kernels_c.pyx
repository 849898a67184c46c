# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled closed-loop motion kernel.

Statement-for-statement mirror of control._kernels_py; see that module for
the documentation of run_motion, the problem dict and the status codes.
"""

from libc.math cimport ceil, exp, fabs, hypot, isfinite, sin
from libc.stdlib cimport free, malloc

DEF FD_DELTA = 1e-6
DEF ADAPT_CAP = 100.0


def backend_name():
    return "compiled"


cdef inline double _smoothstep(double u) nogil:
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


cdef inline double _smoothstep_d(double u) nogil:
    return 30.0 * u * u * (1.0 - u) * (1.0 - u)


cdef inline void _beta(double s, double tau, double *b, double *b1) nogil:
    cdef double u, p, p1
    if s >= tau:
        b[0] = 1.0
        b1[0] = 0.0
        return
    u = s / tau
    p = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    p1 = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    b[0] = 1.0 / p
    b1[0] = -p1 / (tau * p * p)


cdef struct Motion:
    double cx, cy, scale
    int n
    double *bx
    double *by
    double *rho
    double *w
    double gx, gy
    double k1, k2, tau
    double kphi, kv, km, kalpha
    double mass
    int fric_kind
    double fric_a, fric_b
    double dst_x, dst_y, dst_r, ent_r, speed_tol


cdef double _clearance(Motion *m, double x, double y) nogil:
    cdef double cx = (x - m.cx) / m.scale
    cdef double cy = (y - m.cy) / m.scale
    cdef double c = 1.0 - hypot(cx, cy)
    cdef double d
    cdef int i
    for i in range(m.n):
        d = hypot(cx - m.bx[i], cy - m.by[i]) - m.rho[i]
        if d < c:
            c = d
    return c * m.scale


cdef bint _vdesired(Motion *m, double x, double y,
                    double *vdx, double *vdy,
                    double *gwx, double *gwy) nogil:
    cdef double s = m.scale
    cdef double cx = (x - m.cx) / s
    cdef double cy = (y - m.cy) / s
    cdef double j00 = 1.0 / s
    cdef double j01 = 0.0
    cdef double j10 = 0.0
    cdef double j11 = 1.0 / s
    cdef double dx, dy, d, rho, wi, u, g, gp, rx, ry, t
    cdef double a00, a01, a11, n00, n01, n10, n11
    cdef int i
    for i in range(m.n):
        dx = cx - m.bx[i]
        dy = cy - m.by[i]
        d = hypot(dx, dy)
        rho = m.rho[i]
        wi = m.w[i]
        if d >= rho + wi:
            continue
        if d <= rho:
            return False
        u = (rho + wi - d) / wi
        g = d - rho * _smoothstep(u)
        gp = 1.0 + (rho / wi) * _smoothstep_d(u)
        rx = dx / d
        ry = dy / d
        t = g / d
        a00 = t + (gp - t) * rx * rx
        a01 = (gp - t) * rx * ry
        a11 = t + (gp - t) * ry * ry
        cx = m.bx[i] + rx * g
        cy = m.by[i] + ry * g
        n00 = a00 * j00 + a01 * j10
        n01 = a00 * j01 + a01 * j11
        n10 = a01 * j00 + a11 * j10
        n11 = a01 * j01 + a11 * j11
        j00 = n00
        j01 = n01
        j10 = n10
        j11 = n11
        break  # purging annuli are disjoint: at most one map acts

    # navigation function gradient at chi = (cx, cy)
    cdef double px = 2.0 * m.k1 * (cx - m.gx)
    cdef double py = 2.0 * m.k1 * (cy - m.gy)
    cdef double d0 = 1.0 - (cx * cx + cy * cy)
    cdef double b, b1, ex, ey, dl
    if d0 <= 0.0:
        return False
    _beta(d0, m.tau, &b, &b1)
    px += m.k2 * b1 * (-2.0 * cx)
    py += m.k2 * b1 * (-2.0 * cy)
    for i in range(m.n):
        ex = cx - m.bx[i]
        ey = cy - m.by[i]
        dl = ex * ex + ey * ey
        if dl <= 0.0:
            return False
        _beta(dl, m.tau, &b, &b1)
        px += m.k2 * b1 * 2.0 * ex
        py += m.k2 * b1 * 2.0 * ey

    cdef double det = j00 * j11 - j01 * j10
    if det == 0.0:
        return False
    vdx[0] = -(j11 * px - j01 * py) / det
    vdy[0] = -(-j10 * px + j00 * py) / det
    gwx[0] = j00 * px + j10 * py
    gwy[0] = j01 * px + j11 * py
    return True


cdef void _friction(Motion *m, double x, double y, double vx, double vy,
                    double *fx, double *fy) nogil:
    cdef double s
    if m.fric_kind == 1:
        fx[0] = m.fric_a * vx
        fy[0] = m.fric_a * vy
    elif m.fric_kind == 2:
        s = m.fric_a * sin(m.fric_b * (x + y))
        fx[0] = s * (exp(-fabs(vx)) + 1.0) * vx
        fy[0] = s * (exp(-fabs(vy)) + 1.0) * vy
    else:
        fx[0] = 0.0
        fy[0] = 0.0


cdef bint _deriv(Motion *m, double x, double y, double vx, double vy,
                 double mhat, double ahat, double *out) nogil:
    cdef double vdx, vdy, gwx, gwy, vdx2, vdy2, g2x, g2y
    if not _vdesired(m, x, y, &vdx, &vdy, &gwx, &gwy):
        return False
    if not _vdesired(m, x + FD_DELTA * vx, y + FD_DELTA * vy,
                     &vdx2, &vdy2, &g2x, &g2y):
        return False
    cdef double adx = (vdx2 - vdx) / FD_DELTA
    cdef double ady = (vdy2 - vdy) / FD_DELTA
    cdef double evx = vx - vdx
    cdef double evy = vy - vdy
    cdef double kd = m.kv + 1.5 * ahat
    cdef double ux = -m.kphi * gwx + mhat * adx - kd * evx
    cdef double uy = -m.kphi * gwy + mhat * ady - kd * evy
    cdef double fx, fy
    _friction(m, x, y, vx, vy, &fx, &fy)
    out[0] = vx
    out[1] = vy
    out[2] = (ux - fx) / m.mass
    out[3] = (uy - fy) / m.mass
    out[4] = -m.km * (evx * adx + evy * ady)
    out[5] = m.kalpha * (evx * evx + evy * evy)
    out[6] = ux
    out[7] = uy
    return True


def run_motion(prob, double dt, double t_max, long log_every=0):
    """See control._kernels_py.run_motion."""
    cdef Motion m
    m.cx = prob["cx"]
    m.cy = prob["cy"]
    m.scale = prob["scale"]
    bx = prob["bx"]
    by = prob["by"]
    rho = prob["rho"]
    w = prob["w"]
    m.n = len(bx)
    m.bx = <double *> malloc(4 * m.n * sizeof(double)) if m.n else NULL
    cdef int i
    if m.n:
        m.by = m.bx + m.n
        m.rho = m.bx + 2 * m.n
        m.w = m.bx + 3 * m.n
        for i in range(m.n):
            m.bx[i] = bx[i]
            m.by[i] = by[i]
            m.rho[i] = rho[i]
            m.w[i] = w[i]
    m.gx = prob["gx"]
    m.gy = prob["gy"]
    m.k1 = prob["k1"]
    m.k2 = prob["k2"]
    m.tau = prob["tau"]
    m.kphi = prob["kphi"]
    m.kv = prob["kv"]
    m.km = prob["km"]
    m.kalpha = prob["kalpha"]
    m.mass = prob["mass"]
    m.fric_kind = prob["fric_kind"]
    m.fric_a = prob["fric_a"]
    m.fric_b = prob["fric_b"]
    m.dst_x = prob["dst_x"]
    m.dst_y = prob["dst_y"]
    m.dst_r = prob["dst_r"]
    m.ent_r = prob["ent_r"]
    m.speed_tol = prob["speed_tol"]

    cdef double x = prob["x0"]
    cdef double y = prob["y0"]
    cdef double vx = prob["vx0"]
    cdef double vy = prob["vy0"]
    cdef double mhat = prob["mhat0"]
    cdef double ahat = prob["ahat0"]
    log = []
    cdef long n_steps = <long> ceil(t_max / dt)
    cdef int status = 1
    cdef double t = 0.0
    cdef long step = 0
    cdef double h
    cdef double d[8]
    cdef double d2[8]
    cdef double d3[8]
    cdef double d4[8]
    cdef bint ok
    try:
        while step <= n_steps:
            ok = _deriv(&m, x, y, vx, vy, mhat, ahat, d)
            if not ok:
                status = 2
                break
            if log_every and step % log_every == 0:
                log.append((t, x, y, vx, vy, d[6], d[7], mhat, ahat,
                            _clearance(&m, x, y)))
            # arrival: entity ball inside the goal region, nearly at rest
            if (hypot(x - m.dst_x, y - m.dst_y) + m.ent_r <= m.dst_r
                    and hypot(vx, vy) < m.speed_tol):
                status = 0
                break
            if step == n_steps:
                break
            h = dt
            ok = _deriv(&m, x + 0.5 * h * d[0], y + 0.5 * h * d[1],
                        vx + 0.5 * h * d[2], vy + 0.5 * h * d[3],
                        mhat + 0.5 * h * d[4], ahat + 0.5 * h * d[5], d2)
            if not ok:
                status = 2
                break
            ok = _deriv(&m, x + 0.5 * h * d2[0], y + 0.5 * h * d2[1],
                        vx + 0.5 * h * d2[2], vy + 0.5 * h * d2[3],
                        mhat + 0.5 * h * d2[4], ahat + 0.5 * h * d2[5], d3)
            if not ok:
                status = 2
                break
            ok = _deriv(&m, x + h * d3[0], y + h * d3[1],
                        vx + h * d3[2], vy + h * d3[3],
                        mhat + h * d3[4], ahat + h * d3[5], d4)
            if not ok:
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
            if not (isfinite(x) and isfinite(y)
                    and isfinite(vx) and isfinite(vy)):
                status = 3
                break
            step += 1
            t = step * dt
        if log_every and (len(log) == 0 or log[len(log) - 1][0] != t):
            ok = _deriv(&m, x, y, vx, vy, mhat, ahat, d)
            if not ok:
                d[6] = 0.0
                d[7] = 0.0
            log.append((t, x, y, vx, vy, d[6], d[7], mhat, ahat,
                        _clearance(&m, x, y)))
    finally:
        if m.bx != NULL:
            free(m.bx)
    return status, t, x, y, vx, vy, mhat, ahat, log
