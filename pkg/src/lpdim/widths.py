"""Width counts for windowed bodies, with certified lower/upper brackets.

The central quantity is the diameter cut count of a body X inside a normed
window: the smallest codimension of a linear subspace whose intersection
with X has diameter at most eps.  For ellipsoids in the Euclidean window it
equals the number of semiaxes sigma with 2 sigma > eps, which is what makes
p = 2 exactly computable.  Away from p = 2 the module returns a bracket
obtained from norm-comparison constants on the coordinate count actually
carrying the body, plus an optional linear-programming certificate for
inscribed l1 balls that pins full-rank bodies down exactly.

Also here: entrywise and operator norms (exact closed forms where they
exist, certified brackets elsewhere), the Mazur duality map, a projected
descent solver for nearest points in ball-truncated spans with a KKT
residual certificate, and a defect check for almost-identity operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from ._util import COUNT_TOL, RANK_RTOL, check_exponent, conjugate_exponent, lp_norm, rng_for
from .errors import CapabilityError
from .spaces import WindowModel

# window sizes above this skip the l1 inscribed-ball certificate; the LP count
# grows with the window and the comparison bracket already covers large runs
_LP_CLAMP_MAX_DIM = 256


def entrywise_norm(values: np.ndarray, p: float) -> float:
    """Coordinate p-norm of an array, flattened."""
    check_exponent(p)
    return lp_norm(np.asarray(values, dtype=float).ravel(), p)


# ------------------------------------------------------------ operator norm


def _exact_operator_norm(mat: np.ndarray, p_in: float, p_out: float) -> Optional[float]:
    if mat.size == 0:
        return 0.0
    if p_in == 1.0:
        return float(max(lp_norm(mat[:, j], p_out) for j in range(mat.shape[1])))
    if p_out == math.inf:
        q = conjugate_exponent(p_in)
        return float(max(lp_norm(mat[i, :], q) for i in range(mat.shape[0])))
    if p_in == 2.0 and p_out == 2.0:
        return float(np.linalg.svd(mat, compute_uv=False)[0])
    return None


def operator_norm(
    mat: np.ndarray, p_in: float, p_out: float, samples: int = 1000, seed: int = 0
) -> tuple[float, float]:
    """Certified bracket (lo, hi) for the p_in -> p_out operator norm.

    Exact (lo == hi) when p_in = 1, p_out = inf, or both exponents are 2.
    Otherwise lo comes from seeded trial vectors and hi from the smallest of
    several interpolation and embedding bounds, so lo <= norm <= hi always.
    """
    check_exponent(p_in)
    check_exponent(p_out)
    mat = np.asarray(mat, dtype=float)
    exact = _exact_operator_norm(mat, p_in, p_out)
    if exact is not None:
        return exact, exact
    n_out, n_in = mat.shape

    one_to_out = _exact_operator_norm(mat, 1.0, p_out)
    in_to_inf = _exact_operator_norm(mat, p_in, math.inf)
    one_to_one = _exact_operator_norm(mat, 1.0, 1.0)
    inf_to_inf = _exact_operator_norm(mat, math.inf, math.inf)
    sigma_top = float(np.linalg.svd(mat, compute_uv=False)[0])

    inv_in = 0.0 if p_in == math.inf else 1.0 / p_in
    inv_out = 0.0 if p_out == math.inf else 1.0 / p_out
    uppers = [
        n_in ** (1.0 - inv_in) * one_to_out,
        n_out ** inv_out * in_to_inf,
        n_out ** max(0.0, inv_out - 0.5) * n_in ** max(0.0, 0.5 - inv_in) * sigma_top,
    ]
    if p_in == p_out:
        uppers.append(one_to_one ** inv_in * inf_to_inf ** (1.0 - inv_in))
    hi = float(min(uppers))

    rng = rng_for(seed, "operator-norm")
    trials = [np.eye(n_in)[:, j] for j in range(n_in)]
    _, _, vh = np.linalg.svd(mat)
    trials.append(vh[0])
    trials.extend(rng.normal(size=(samples, n_in)))
    lo = 0.0
    for x in trials:
        nx = lp_norm(x, p_in)
        if nx > 0.0:
            lo = max(lo, lp_norm(mat @ x, p_out) / nx)
    return min(lo, hi), hi


# -------------------------------------------------------- ellipsoid profile


def ellipsoid_map(model: WindowModel) -> np.ndarray:
    """Matrix B with the model body equal to {B u : |u|_2 <= 1} in l2 terms.

    For inner models this whitens the full-space Gram of the stored columns,
    so B carries the restriction of the genuine span ball.  For outer and
    exact models the body is span cap ball and B is an orthonormal basis.
    """
    mat = model.matrix
    if model.num_columns == 0:
        return np.zeros((mat.shape[0], 0))
    if model.polarity in ("outer", "exact"):
        u, s, _ = np.linalg.svd(mat, full_matrices=False)
        keep = s > s[0] * RANK_RTOL if s.size and s[0] > 0 else np.zeros(0, dtype=bool)
        return u[:, keep]
    full = model.full_matrix if model.full_matrix is not None else mat
    gram = full.T @ full
    lam, vecs = np.linalg.eigh(gram)
    lam_max = float(lam[-1]) if lam.size else 0.0
    if lam_max <= 0.0:
        return np.zeros((mat.shape[0], 0))
    keep = lam > lam_max * RANK_RTOL ** 2
    return mat @ (vecs[:, keep] / np.sqrt(lam[keep]))


def singular_profile(model: WindowModel) -> np.ndarray:
    """Semiaxes of the model body seen through the l2 window, descending."""
    b = ellipsoid_map(model)
    if b.shape[1] == 0:
        return np.zeros(0)
    s = np.linalg.svd(b, compute_uv=False)
    if model.polarity == "inner":
        # restriction cannot expand a full-space unit vector, so clip the
        # harmless eigenvalue noise that lands a hair above one
        s = np.minimum(s, 1.0)
    return s[s > COUNT_TOL]


def seminorm_cut_count(b: np.ndarray, rows: Sequence[int], eps: float) -> int:
    """Diameter cut count of the ellipsoid body under the row-subset seminorm.

    Cutting the top singular directions of the row slice certifies the upper
    bound; restricting any eps-cut to the slice certifies the lower one, so
    for ellipsoids this count is the exact seminorm analogue.
    """
    sliced = np.asarray(b, dtype=float)[list(rows), :]
    if sliced.size == 0:
        return 0
    s = np.linalg.svd(sliced, compute_uv=False)
    return int(np.sum(2.0 * s > eps))


# ------------------------------------------------------------- width counts


def ldim_hilbert(model: WindowModel, eps: float) -> int:
    """Exact diameter cut count at p = 2 (semiaxis count, ties excluded).

    Semiaxes within the counting guard of the boundary are treated as ties
    and excluded, so a tie survives the roundoff in the whitening step.
    """
    if model.p != 2.0:
        raise CapabilityError("the exact route needs p = 2; use ldim_bracket")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if eps >= 2.0:
        return 0
    if model.polarity in ("outer", "exact"):
        return model.rank()
    return int(np.sum(2.0 * singular_profile(model) > eps + COUNT_TOL))


def inscribed_l1_radius(model: WindowModel) -> float:
    """Radius of the largest l1 window ball certified inside an inner body.

    Solves, for every window coordinate, the minimum full-space l1 norm of a
    span element restricting to that coordinate's indicator.  When all the
    programs succeed, scaling shows every window vector of l1 norm 1/M lifts
    into the body, M the worst minimum.  Returns 0 when no certificate is
    available (rank-deficient restriction, oversized window, LP failure).
    """
    from scipy.optimize import linprog

    if model.polarity != "inner" or model.p != 1.0:
        return 0.0
    n = model.matrix.shape[0]
    if n > _LP_CLAMP_MAX_DIM or model.num_columns == 0 or model.rank() < n:
        return 0.0
    full = model.full_matrix if model.full_matrix is not None else model.matrix
    rows, k = full.shape
    # variables: span coefficients c, then absolute-value slacks t
    objective = np.concatenate([np.zeros(k), np.ones(rows)])
    a_ub = np.block(
        [[full, -np.eye(rows)], [-full, -np.eye(rows)]]
    )
    b_ub = np.zeros(2 * rows)
    bounds = [(None, None)] * k + [(0.0, None)] * rows
    worst = 0.0
    for i in range(n):
        target = np.zeros(n)
        target[i] = 1.0
        a_eq = np.hstack([model.matrix, np.zeros((n, rows))])
        res = linprog(
            objective, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=target,
            bounds=bounds, method="highs",
        )
        if not res.success:
            return 0.0
        worst = max(worst, float(res.fun))
    return 1.0 / worst if worst > 0.0 else 0.0


@dataclass(frozen=True)
class BracketProfile:
    """Everything eps-independent about a model body, cached once per window."""

    p: float
    polarity: str
    rank: int
    sigma: tuple[float, ...]
    window_rows: int
    window_support: int
    full_support: int
    l1_radius: float


def bracket_profile(model: WindowModel) -> BracketProfile:
    if model.polarity in ("outer", "exact"):
        return BracketProfile(
            p=model.p,
            polarity=model.polarity,
            rank=model.rank(),
            sigma=(),
            window_rows=model.matrix.shape[0],
            window_support=0,
            full_support=0,
            l1_radius=0.0,
        )
    sigma = singular_profile(model)
    full = model.full_matrix if model.full_matrix is not None else model.matrix
    n_eff = max(1, int(np.sum(np.any(model.matrix != 0.0, axis=1))))
    full_eff = max(1, int(np.sum(np.any(full != 0.0, axis=1))))
    radius = 0.0
    if model.p == 1.0:
        radius = inscribed_l1_radius(model)
    return BracketProfile(
        p=model.p,
        polarity="inner",
        rank=int(sigma.size),
        sigma=tuple(float(s) for s in sigma),
        window_rows=model.matrix.shape[0],
        window_support=n_eff,
        full_support=full_eff,
        l1_radius=radius,
    )


def bracket_counts(profile: BracketProfile, eps: float) -> tuple[int, int]:
    """Certified (lo, hi) diameter cut counts from a cached profile.

    Exact for exact and outer polarities (span cap ball: the count is the
    rank below diameter two) and at p = 2.  Elsewhere the ellipsoid profile
    is squeezed through norm-comparison constants: the support size of the
    full-space columns rescales the body, the support size inside the window
    rescales the metric.  At p = 1 a full-rank inscribed l1 ball upgrades the
    lower bound to the whole window dimension.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if eps >= 2.0:
        return 0, 0
    if profile.polarity in ("outer", "exact"):
        return profile.rank, profile.rank
    sigma = np.asarray(profile.sigma)
    if sigma.size == 0:
        return 0, 0
    if profile.p == 2.0:
        k = int(np.sum(2.0 * sigma > eps + COUNT_TOL))
        return k, k

    inv_p = 0.0 if profile.p == math.inf else 1.0 / profile.p
    gap = 0.5 - inv_p  # negative below p = 2, positive above
    if gap <= 0.0:
        body_shrink = profile.full_support ** gap   # scaled ellipsoid inside the body
        metric_shrink = profile.window_support ** gap  # p-metric dominates l2
        lo = int(np.sum(2.0 * body_shrink * sigma > eps))
        hi = int(np.sum(2.0 * sigma > eps * metric_shrink))
    else:
        body_grow = profile.full_support ** gap     # body inside a blown-up ellipsoid
        metric_grow = profile.window_support ** gap
        lo = int(np.sum(2.0 * sigma > eps * metric_grow))
        hi = int(np.sum(2.0 * body_grow * sigma > eps))

    if profile.p == 1.0 and lo < profile.window_rows:
        if profile.l1_radius > 0.0 and eps < 2.0 * profile.l1_radius - 1e-6:
            lo = profile.window_rows
    hi = max(lo, hi)
    return lo, hi


def ldim_bracket(model: WindowModel, eps: float) -> tuple[int, int]:
    """Certified (lo, hi) for the diameter cut count of the model body."""
    return bracket_counts(bracket_profile(model), eps)


@dataclass(frozen=True)
class WidthCounts:
    """Four ellipsoid width counts at a common scale (p = 2 window).

    inscribed: largest dimension of a slice containing an eps ball
    thickness: largest dimension with all semiaxes at least eps
    radius_cut: smallest codimension with section radius at most eps
    diameter_cut: smallest codimension with section diameter at most eps
    """

    inscribed: int
    thickness: int
    radius_cut: int
    diameter_cut: int


def four_widths(model: WindowModel, eps: float) -> WidthCounts:
    if model.p != 2.0:
        raise CapabilityError("width quartet is computed in the p = 2 window")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    sigma = singular_profile(model)
    if model.polarity in ("outer", "exact"):
        sigma = np.ones(model.rank())
    # ties include for the inscribed counts, exclude for the cut counts,
    # with the counting guard absorbing whitening roundoff either way
    at_least = int(np.sum(sigma >= eps - COUNT_TOL))
    return WidthCounts(
        inscribed=at_least,
        thickness=at_least,
        radius_cut=int(np.sum(sigma > eps + COUNT_TOL)),
        diameter_cut=int(np.sum(2.0 * sigma > eps + COUNT_TOL)) if eps < 2.0 else 0,
    )


# ----------------------------------------------------------------- duality


def mazur(values: np.ndarray, p: float) -> np.ndarray:
    """Duality map sign(x) |x|^(p-1); pairs to the p-th power of the norm."""
    if p == math.inf:
        raise CapabilityError("the duality map is used at finite p")
    check_exponent(p)
    x = np.asarray(values, dtype=float)
    return np.sign(x) * np.abs(x) ** (p - 1.0)


# ------------------------------------------------------------ nearest point


@dataclass(frozen=True)
class SolverSettings:
    max_iter: int = 10000
    tol: float = 1e-8
    initial_step: float = 1.0
    polish: bool = True


@dataclass(frozen=True, eq=False)
class NearestPointResult:
    point: np.ndarray
    coefficients: np.ndarray
    distance: float
    kkt_residual: float
    multiplier: float
    iterations: int
    converged: bool


def _orthonormal_span(basis: np.ndarray) -> np.ndarray:
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[1] == 0:
        return np.zeros((basis.shape[0] if basis.ndim == 2 else 0, 0))
    u, s, _ = np.linalg.svd(basis, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((basis.shape[0], 0))
    return u[:, s > s[0] * RANK_RTOL]


def _kkt_state(q: np.ndarray, target: np.ndarray, x: np.ndarray, p: float, ball: bool):
    """First-order residual: plain pairing residual on a subspace, the
    complementary-slackness form when the unit ball is part of the body."""
    grad_fit = q.T @ mazur(target - x, p)
    lam = 0.0
    if ball and lp_norm(x, p) >= 1.0 - 1e-9:
        grad_ball = q.T @ mazur(x, p)
        denom = float(np.dot(grad_ball, grad_ball))
        if denom > 0.0:
            lam = max(0.0, float(np.dot(grad_fit, grad_ball)) / denom)
        grad_fit = grad_fit - lam * grad_ball
    value = float(np.max(np.abs(grad_fit))) if grad_fit.size else 0.0
    return value, lam


def nearest_point(
    target: np.ndarray,
    basis: np.ndarray,
    p: float,
    settings: Optional[SolverSettings] = None,
    within_ball: bool = True,
) -> NearestPointResult:
    """Best p-norm approximation of target from a span, optionally ball-cut.

    Minimizes the p distance from target over span(basis), intersected with
    the unit ball when within_ball is set, by projected descent with
    backtracking plus an optional scipy polish.  The result always carries a
    first-order residual (the pairing residual on a subspace, its KKT
    analogue on the ball) instead of raising; callers needing guarantees
    check the converged flag.
    """
    if not (1.0 < p < math.inf):
        raise CapabilityError("nearest_point needs p strictly between 1 and infinity")
    cfg = settings or SolverSettings()
    target = np.asarray(target, dtype=float)
    q = _orthonormal_span(basis)
    if q.shape[1] == 0:
        return NearestPointResult(
            point=np.zeros_like(target),
            coefficients=np.zeros(0),
            distance=lp_norm(target, p),
            kkt_residual=0.0,
            multiplier=0.0,
            iterations=0,
            converged=True,
        )

    def clamp(a):
        if not within_ball:
            return a
        x = q @ a
        nn = lp_norm(x, p)
        return a / nn if nn > 1.0 else a

    if p == 2.0:
        a = clamp(q.T @ target)
        x = q @ a
        resid, lam = _kkt_state(q, target, x, 2.0, within_ball)
        return NearestPointResult(
            point=x,
            coefficients=a,
            distance=lp_norm(target - x, 2.0),
            kkt_residual=resid,
            multiplier=lam,
            iterations=0,
            converged=True,
        )

    a = clamp(q.T @ target)  # warm start at the (clamped) l2 projection

    def objective(av):
        return lp_norm(target - q @ av, p) ** p

    best = objective(a)
    step = cfg.initial_step
    iters = 0
    resid, lam = _kkt_state(q, target, q @ a, p, within_ball)
    while iters < cfg.max_iter and resid > cfg.tol:
        iters += 1
        grad = q.T @ mazur(target - q @ a, p)  # descent direction for the fit
        improved = False
        while step > 1e-14:
            trial = clamp(a + step * grad)
            val = objective(trial)
            if val < best - 1e-15:
                a, best = trial, val
                improved = True
                step *= 1.5
                break
            step *= 0.5
        resid, lam = _kkt_state(q, target, q @ a, p, within_ball)
        if not improved:
            break

    if resid > cfg.tol and cfg.polish:
        from scipy.optimize import minimize

        def jac(av):
            return -p * (q.T @ mazur(target - q @ av, p))

        try:
            if within_ball:
                cons = {
                    "type": "ineq",
                    "fun": lambda av: 1.0 - lp_norm(q @ av, p) ** p,
                    "jac": lambda av: -p * (q.T @ mazur(q @ av, p)),
                }
                out = minimize(
                    objective, a, jac=jac, constraints=[cons], method="SLSQP",
                    options={"maxiter": 500, "ftol": 1e-16},
                )
            else:
                out = minimize(
                    objective, a, jac=jac, method="BFGS",
                    options={"maxiter": 5000, "gtol": 1e-14},
                )
            trial = clamp(np.asarray(out.x, dtype=float))
            if objective(trial) <= best + 1e-12:
                a = trial
                best = objective(a)
        except Exception:  # noqa: BLE001 - the residual below reports the truth
            pass
        resid, lam = _kkt_state(q, target, q @ a, p, within_ball)

    x = q @ a
    return NearestPointResult(
        point=x,
        coefficients=a,
        distance=lp_norm(target - x, p),
        kkt_residual=resid,
        multiplier=lam,
        iterations=iters,
        converged=bool(resid <= cfg.tol),
    )


# --------------------------------------------------------------- defect law


@dataclass(frozen=True)
class KernelDefectReport:
    defect: float
    nullity: int
    bound: float
    consistent: bool


def kernel_defect_check(op: np.ndarray, p: float) -> KernelDefectReport:
    """Almost-identity operators have small kernels: nullity <= N defect^2.

    defect measures columns of op against the standard basis in the p norm;
    for p in [1, 2] that dominates the Euclidean defect, and the Frobenius
    distance from the identity to any matrix with k-dimensional kernel is at
    least sqrt(k), which gives the stated bound.
    """
    check_exponent(p)
    if p > 2.0:
        raise CapabilityError("the defect law is certified for p in [1, 2]")
    op = np.asarray(op, dtype=float)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("kernel_defect_check expects a square matrix")
    n = op.shape[0]
    if n == 0:
        return KernelDefectReport(0.0, 0, 0.0, True)
    gap = op - np.eye(n)
    defect = float(max(lp_norm(gap[:, j], p) for j in range(n)))
    svals = np.linalg.svd(op, compute_uv=False)
    top = float(svals[0]) if svals.size else 0.0
    nullity = int(np.sum(svals < top * RANK_RTOL)) if top > 0.0 else n
    bound = n * defect * defect
    return KernelDefectReport(
        defect=defect,
        nullity=nullity,
        bound=bound,
        consistent=bool(nullity <= bound + COUNT_TOL),
    )
