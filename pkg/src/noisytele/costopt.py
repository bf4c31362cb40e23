"""Minimum classical communication cost for non-classical fidelity.

Model I: minimise I(p) = 2 + sum p_i log2 p_i over the simplex subject to
f_noise(p) <= (sum t - 1) / 2. I is convex and f_noise is linear, so the
optimum is the Gibbs-form channel p_i ~ exp(-beta c_i) with the noise costs
c = (0, t1 + t3, t2 + t3, t1 + t2), and beta is fixed by making the constraint
tight. That reduces the problem to one monotone root find.

Model II: minimise 2 - H(eta) - H(eta') over [1/2, 1]^2. Both the cost and
f'_noise are monotone in each variable, so the optimum lies on the curve
f'_noise = (sum t - 1) / 2, along which eta' is an explicit function of eta.
The curve is scanned densely in both parametrisations and then refined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .canonical import CanonicalForm, DetSign
from .channels import NoiseModelI, NoiseModelII, xlog2x, binary_entropy, mutual_info_I
from .errors import ScopeError

BOUNDARY_TOL = 1e-9
SCAN_POINTS = 20_001
SIMPLEX_RESOLUTION = 0.005
BOX_RESOLUTION = 0.001

SOLVED = "solved"
INFEASIBLE = "infeasible"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class CostSolution:
    channel: NoiseModelI | NoiseModelII | None
    cost: float
    constraint_residual: float
    stationary_residuals: np.ndarray
    status: str

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


def _require_negative(cf: CanonicalForm):
    if cf.det_sign is not DetSign.NEGATIVE:
        raise ScopeError(
            f"condition not applicable: defined only for det T < 0 (got {cf.det_sign.name.lower()})"
        )


def _noise_budget(cf: CanonicalForm) -> float:
    return (cf.t.sum() - 1) / 2


def noise_costs(cf: CanonicalForm) -> np.ndarray:
    t1, t2, t3 = cf.t
    return np.array([0.0, t1 + t3, t2 + t3, t1 + t2])


def _infeasible() -> CostSolution:
    return CostSolution(None, math.nan, math.nan, np.full(2, math.nan), INFEASIBLE)


# Residuals -------------------------------------------------------------------


def _residuals_I(cf: CanonicalForm, p) -> np.ndarray:
    """Residuals of the two linear stationary relations for p0 and p1."""
    t1, t2, t3 = cf.t
    p0, p1, p2, p3 = p
    den = 2 * (t1 + t3)
    if den == 0:
        return np.array([math.inf, math.inf])
    r0 = p0 - (1 + t1 - t2 + t3 + 2 * p2 * (t2 - t1) + 2 * p3 * (t2 - t3)) / den
    r1 = p1 - (-1 + t1 + t2 + t3 - 2 * p2 * (t2 + t3) - 2 * p3 * (t1 + t2)) / den
    return np.array([r0, r1])


def _logit2(x: float) -> float:
    if x <= 0 or x >= 1:
        return math.inf
    return math.log2(x) - math.log2(1 - x)


def _residuals_II(cf: CanonicalForm, eta: float, eta_p: float) -> np.ndarray:
    """Cross-multiplied log-ratio condition, then the active constraint."""
    t1, t2, t3 = cf.t
    le, lf = _logit2(eta), _logit2(eta_p)
    if math.isinf(le) or math.isinf(lf):
        r44 = math.inf
    else:
        r44 = le * (t2 - (1 - 2 * eta) * t3) - lf * (t1 - (1 - 2 * eta_p) * t3)
    f_noise = t1 * (1 - eta) + t2 * (1 - eta_p) + t3 * (eta + eta_p - 2 * eta * eta_p)
    return np.array([r44, cf.t.sum() - 1 - 2 * f_noise])


def stationary_residuals(cf: CanonicalForm, channel) -> np.ndarray:
    """Stationary-condition residuals (left minus right) at ``channel``.

    Model I gives the p0 and p1 relations; Model II gives the log-ratio
    condition and the constraint. Corners where a logarithm diverges report
    +inf.
    """
    _require_negative(cf)
    if isinstance(channel, NoiseModelII):
        return _residuals_II(cf, channel.eta, channel.eta_prime)
    return _residuals_I(cf, NoiseModelI(getattr(channel, "p", channel)).p)


def gibbs_residuals(cf: CanonicalForm, channel: NoiseModelI) -> np.ndarray:
    """Lagrange stationarity of the entropy objective itself.

    log2(p_i / p0) + beta c_i must vanish for a common beta; returns the
    three deviations from the least-squares beta (inf if some p_i is 0).
    """
    p = channel.p
    if np.any(p <= 0):
        return np.full(3, math.inf)
    c = noise_costs(cf)[1:]
    y = np.log2(p[1:] / p[0])
    beta = -(c @ y) / (c @ c)
    return y + beta * c


# Model I ---------------------------------------------------------------------


def _gibbs(c: np.ndarray, beta: float) -> np.ndarray:
    w = np.exp(-beta * (c - c.min()))
    return w / w.sum()


def min_cost_model_I(cf: CanonicalForm) -> CostSolution:
    _require_negative(cf)
    budget = _noise_budget(cf)
    if budget <= 0:
        return _infeasible()
    c = noise_costs(cf)

    def gap(beta):
        return _gibbs(c, beta) @ c - budget

    hi = 1.0
    while gap(hi) > 0:
        hi *= 2
    beta = brentq(gap, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    ch = NoiseModelI(_gibbs(c, beta))
    f_noise = ch.p @ c
    return CostSolution(
        channel=ch,
        cost=mutual_info_I(ch),
        constraint_residual=float(cf.t.sum() - 1 - 2 * f_noise),
        stationary_residuals=_residuals_I(cf, ch.p),
        status=SOLVED,
    )


# Model II --------------------------------------------------------------------


def _cost_II(eta, eta_p):
    return 2 - binary_entropy(eta) - binary_entropy(eta_p)


def _partner(ta, tb, tc, budget, x):
    """Solve the active constraint for the second variable given the first.

    ``ta`` weighs (1 - x), ``tb`` weighs (1 - y), ``tc`` weighs x + y - 2xy.
    """
    den = tb - tc * (1 - 2 * x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (ta * (1 - x) + tb + tc * x - budget) / den


def _curve_candidates(cf: CanonicalForm, budget: float):
    """Points (eta, eta') of the constraint curve inside the box, from both parametrisations."""
    t1, t2, t3 = cf.t
    grid = np.linspace(0.5, 1.0, SCAN_POINTS)
    pts = []
    y = _partner(t1, t2, t3, budget, grid)
    ok = np.isfinite(y) & (y >= 0.5 - 1e-12) & (y <= 1 + 1e-12)
    pts.append(np.column_stack([grid[ok], np.clip(y[ok], 0.5, 1)]))
    x = _partner(t2, t1, t3, budget, grid)
    ok = np.isfinite(x) & (x >= 0.5 - 1e-12) & (x <= 1 + 1e-12)
    pts.append(np.column_stack([np.clip(x[ok], 0.5, 1), grid[ok]]))
    return np.vstack(pts)


def _refine_II(cf: CanonicalForm, budget: float, eta0: float, eta_p0: float):
    """Local refinement along the curve around a scanned point."""
    t1, t2, t3 = cf.t
    step = 0.5 / (SCAN_POINTS - 1)
    best = (float(_cost_II(eta0, eta_p0)), eta0, eta_p0)
    for swap in (False, True):
        if swap:
            ta, tb, x0 = t2, t1, eta_p0
        else:
            ta, tb, x0 = t1, t2, eta0

        def along(x, ta=ta, tb=tb, swap=swap):
            y = float(_partner(ta, tb, t3, budget, x))
            return (y, x) if swap else (x, y)

        lo, hi = max(0.5, x0 - 2 * step), min(1.0, x0 + 2 * step)
        if hi <= lo:
            continue

        def obj(x, along=along):
            e, f = along(x)
            if not (0.5 - 1e-12 <= e <= 1 + 1e-12 and 0.5 - 1e-12 <= f <= 1 + 1e-12):
                return math.inf
            return float(_cost_II(min(max(e, 0.5), 1), min(max(f, 0.5), 1)))

        cands = []
        res = minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        cands.append(res.x)

        def grad(x, along=along):
            e, f = along(x)
            if not (0.5 <= e <= 1 and 0.5 <= f <= 1):
                return math.nan
            return _residuals_II(cf, e, f)[0]

        g_lo, g_hi = grad(lo), grad(hi)
        if np.isfinite(g_lo) and np.isfinite(g_hi) and g_lo * g_hi < 0:
            cands.append(brentq(grad, lo, hi, xtol=1e-15, maxiter=500))
        for x in cands:
            e, f = along(x)
            if 0.5 - 1e-12 <= e <= 1 + 1e-12 and 0.5 - 1e-12 <= f <= 1 + 1e-12:
                e, f = min(max(e, 0.5), 1.0), min(max(f, 0.5), 1.0)
                val = float(_cost_II(e, f))
                if val < best[0]:
                    best = (val, e, f)
    return best


def min_cost_model_II(cf: CanonicalForm) -> CostSolution:
    _require_negative(cf)
    budget = _noise_budget(cf)
    if budget <= 0:
        return _infeasible()
    pts = _curve_candidates(cf, budget)
    vals = _cost_II(pts[:, 0], pts[:, 1])
    b = int(np.argmin(vals))
    cost, eta, eta_p = _refine_II(cf, budget, float(pts[b, 0]), float(pts[b, 1]))
    ch = NoiseModelII(eta, eta_p)
    on_edge = any(abs(v - 0.5) <= BOUNDARY_TOL or abs(v - 1) <= BOUNDARY_TOL for v in (eta, eta_p))
    res = _residuals_II(cf, eta, eta_p)
    return CostSolution(ch, cost, float(res[1]), res, BOUNDARY if on_edge else SOLVED)


# Grid oracles ----------------------------------------------------------------


@lru_cache(maxsize=4)
def simplex_grid(resolution: float = SIMPLEX_RESOLUTION) -> np.ndarray:
    """All points of the probability simplex with coordinates on a 1/N lattice."""
    N = round(1 / resolution)
    a, b, c = np.meshgrid(np.arange(N + 1), np.arange(N + 1), np.arange(N + 1), indexing="ij")
    keep = a + b + c <= N
    a, b, c = a[keep], b[keep], c[keep]
    pts = np.column_stack([N - a - b - c, a, b, c]).astype(float) / N
    pts.setflags(write=False)
    return pts


def grid_min_cost_model_I(cf: CanonicalForm, resolution: float = SIMPLEX_RESOLUTION):
    """(cost, p) of the cheapest feasible lattice channel, or (inf, None)."""
    P = simplex_grid(resolution)
    ok = P @ noise_costs(cf) <= _noise_budget(cf)
    if not ok.any():
        return math.inf, None
    Q = P[ok]
    cost = 2 + xlog2x(Q).sum(axis=1)
    b = int(np.argmin(cost))
    return float(cost[b]), Q[b]


def grid_min_cost_model_II(cf: CanonicalForm, resolution: float = BOX_RESOLUTION):
    """(cost, (eta, eta')) of the cheapest feasible lattice point, or (inf, None)."""
    t1, t2, t3 = cf.t
    g = np.linspace(0.5, 1.0, round(0.5 / resolution) + 1)
    E, F = np.meshgrid(g, g, indexing="ij")
    fn = t1 * (1 - E) + t2 * (1 - F) + t3 * (E + F - 2 * E * F)
    ok = fn <= _noise_budget(cf)
    if not ok.any():
        return math.inf, None
    cost = np.where(ok, 2 - binary_entropy(E) - binary_entropy(F), np.inf)
    idx = np.unravel_index(int(np.argmin(cost)), cost.shape)
    return float(cost[idx]), (float(E[idx]), float(F[idx]))
