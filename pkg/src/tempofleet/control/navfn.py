"""Second-order navigation function over the point world.

φ(χ) = k₁‖χ − χ_d‖² + k₂ Σ_ℓ [β(d_ℓ(χ)) − 1], with d_ℓ the squared
distance to obstacle point ℓ and d₀ = 1 − ‖χ‖² the boundary margin; the
constant is subtracted so φ(χ_d) = 0.  β is the reciprocal quintic
smoothstep: flat (≡ 1) beyond the influence radius τ, blowing up at 0.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class NavFnParams:
    k1: float
    k2: float
    tau: float

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0 or self.tau <= 0:
            raise ValueError("navigation gains and tau must be positive")


def beta(s, tau):
    """(β, β', β'') at squared-distance s; raises on s <= 0 (collision)."""
    if s <= 0:
        raise ValueError("nonpositive squared distance: collision")
    if s >= tau:
        return 1.0, 0.0, 0.0
    u = s / tau
    p = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    p1 = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    p2 = u * (60.0 + u * (-180.0 + 120.0 * u))
    b = 1.0 / p
    b1 = -p1 / (tau * p * p)
    b2 = (2.0 * p1 * p1 - p * p2) / (tau * tau * p * p * p)
    return b, b1, b2


def navfn(chi, pw, params):
    """(value, gradient) of the navigation function at χ = (x, y)."""
    x, y = chi
    gx_, gy_ = pw.goal
    dx, dy = x - gx_, y - gy_
    value = params.k1 * (dx * dx + dy * dy)
    gx = 2.0 * params.k1 * dx
    gy = 2.0 * params.k1 * dy
    # workspace boundary: d0 = 1 - |χ|², ∇d0 = -2χ
    d0 = 1.0 - (x * x + y * y)
    b, b1, _ = beta(d0, params.tau)
    value += params.k2 * (b - 1.0)
    gx += params.k2 * b1 * (-2.0 * x)
    gy += params.k2 * b1 * (-2.0 * y)
    for i in range(pw.n_obstacles):
        ex, ey = x - pw.bx[i], y - pw.by[i]
        dl = ex * ex + ey * ey
        b, b1, _ = beta(dl, params.tau)
        value += params.k2 * (b - 1.0)
        gx += params.k2 * b1 * 2.0 * ex
        gy += params.k2 * b1 * 2.0 * ey
    return value, (gx, gy)
