"""Estimators for classic (single-valued) regression problems.

Three fitting routines over a dense design matrix without intercept
column:

* ``fit_ols``         least squares via the normal equations,
* ``fit_ridge``       closed form ``(X'X + lambda*I) b = X'y``,
* ``fit_elastic_net`` cyclic coordinate descent with soft-thresholding;
  ``alpha=1`` is the lasso, ``alpha=0`` matches ridge.

The penalized objective is used exactly as written, with no ``1/n`` or
``1/(2n)`` factor:

    sum_i (y_i - b0 - sum_j x_ij b_j)^2
        + lambda * (alpha * sum_j |b_j| + (1 - alpha) * sum_j b_j^2)

The intercept is never penalized.  Penalized fits standardize predictors
internally by default (centered, scaled to unit standard deviation with
divisor n) and report coefficients back on the original scale; the
penalty weight therefore refers to standardized coefficients.  A lambda
in the common convention that divides the squared loss by 2n corresponds
to ``2 * n * lambda`` here for the L1 term and ``n * lambda`` for the L2
term.

Linear systems are solved by an in-house Cholesky factorization so that
rank deficiency is reported with the offending pivot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: a coefficient whose back-transformed magnitude is below this is
#: treated as not selected (coordinate descent produces exact zeros,
#: so this is a safety margin only).
SUPPORT_TOL = 1e-10

#: relative pivot threshold for declaring a Gram matrix singular.
PIVOT_RTOL = 1e-12

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 100_000


class SolverError(Exception):
    """Numerical failure inside a fitting routine."""


class SingularDesign(SolverError):
    """Rank-deficient Gram matrix; ``pivot_index`` is the failing column."""

    def __init__(self, pivot_index: int, pivot: float):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(
            f"Gram matrix is numerically singular at pivot {pivot_index} "
            f"(value {pivot:.3e})"
        )


class NonFiniteEncountered(SolverError):
    """Coordinate descent produced a non-finite value."""


@dataclass(frozen=True, eq=False)
class DesignProblem:
    """An unweighted regression problem: X (n x p, no intercept column), y (n)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"X must be a 2-d matrix, got shape {X.shape}")
        if y.ndim != 1:
            raise ValueError(f"y must be a vector, got shape {y.shape}")
        n, p = X.shape
        if n < 1 or p < 1:
            raise ValueError(f"need n >= 1 and p >= 1, got X shape {X.shape}")
        if y.shape[0] != n:
            raise ValueError(f"X has {n} rows but y has {y.shape[0]}")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValueError("X and y must be finite")
        X = X.copy()
        y = y.copy()
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class PenaltySpec:
    """Shrinkage strength ``lam >= 0`` and L1/L2 mix ``alpha`` in [0, 1]."""

    lam: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Fitted coefficients on the original predictor scale.

    ``means``/``scales`` record the internal standardization applied
    during a penalized fit (``None`` for plain least squares); the
    standardized-scale slope j is ``betas[j] * scales[j]``.  ``converged``
    is False only when coordinate descent hit its sweep limit, in which
    case the best iterate is still returned.
    """

    intercept: float
    betas: np.ndarray
    means: np.ndarray | None = None
    scales: np.ndarray | None = None
    converged: bool = True
    n_sweeps: int = 0

    def __post_init__(self):
        b = np.asarray(self.betas, dtype=float).copy()
        b.flags.writeable = False
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "intercept", float(self.intercept))
        for name in ("means", "scales"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float).copy()
                v.flags.writeable = False
                object.__setattr__(self, name, v)

    @property
    def p(self) -> int:
        return self.betas.shape[0]

    def support(self, tol: float = SUPPORT_TOL) -> np.ndarray:
        """Boolean mask of selected predictors (|beta| above ``tol``)."""
        return np.abs(self.betas) > tol


# ---------------------------------------------------------------------------
# Dense symmetric solve
# ---------------------------------------------------------------------------

def solve_spd(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``gram @ x = rhs`` for a symmetric positive definite matrix.

    Cholesky factorization; a pivot below ``PIVOT_RTOL`` times the largest
    diagonal entry raises :class:`SingularDesign` with the pivot index.
    """
    g = np.asarray(gram, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    k = g.shape[0]
    threshold = PIVOT_RTOL * float(np.max(np.diag(g))) if k else 0.0
    L = np.zeros_like(g)
    for j in range(k):
        pivot = g[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > threshold:
            raise SingularDesign(j, float(pivot))
        L[j, j] = math.sqrt(pivot)
        if j + 1 < k:
            L[j + 1 :, j] = (g[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    # forward then backward substitution
    z = np.zeros(k)
    for i in range(k):
        z[i] = (rhs[i] - L[i, :i] @ z[:i]) / L[i, i]
    x = np.zeros(k)
    for i in range(k - 1, -1, -1):
        x[i] = (z[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x


def _standardize(X: np.ndarray, scale: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Center columns; divide by population standard deviation when ``scale``."""
    means = X.mean(axis=0)
    Xc = X - means
    if scale:
        scales = np.sqrt((Xc**2).mean(axis=0))
        scales = np.where(scales == 0.0, 1.0, scales)
    else:
        scales = np.ones(X.shape[1])
    return Xc / scales, means, scales


def _back_transform(
    beta_std: np.ndarray,
    y_mean: float,
    means: np.ndarray,
    scales: np.ndarray,
    converged: bool = True,
    n_sweeps: int = 0,
) -> CoefficientSet:
    betas = beta_std / scales
    intercept = y_mean - betas @ means
    return CoefficientSet(
        intercept, betas, means=means, scales=scales,
        converged=converged, n_sweeps=n_sweeps,
    )


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

def fit_ols(problem: DesignProblem) -> CoefficientSet:
    """Least squares via the normal equations of the intercept-augmented design."""
    Xt = np.column_stack([np.ones(problem.n), problem.X])
    coef = solve_spd(Xt.T @ Xt, Xt.T @ problem.y)
    return CoefficientSet(coef[0], coef[1:])


def fit_ridge(problem: DesignProblem, lam: float, standardize: bool = True) -> CoefficientSet:
    """Closed-form ridge with an unpenalized intercept.

    Solves ``(Xs'Xs + lam*I) b = Xs'(y - mean(y))`` on centered (and, by
    default, unit-variance) predictors, which is exactly the minimizer of
    the augmented problem with the intercept left out of the penalty.
    ``lam=0`` reproduces :func:`fit_ols`.
    """
    if not (math.isfinite(lam) and lam >= 0.0):
        raise ValueError(f"lambda must be finite and >= 0, got {lam}")
    Xs, means, scales = _standardize(problem.X, scale=standardize)
    y_mean = problem.y.mean()
    yc = problem.y - y_mean
    gram = Xs.T @ Xs + lam * np.eye(problem.p)
    beta_std = solve_spd(gram, Xs.T @ yc)
    return _back_transform(beta_std, y_mean, means, scales)


def coordinate_descent(
    Xs: np.ndarray,
    yc: np.ndarray,
    lam: float,
    alpha: float,
    tol: float,
    max_iter: int,
    beta0: np.ndarray | None = None,
) -> tuple[np.ndarray, bool, int, list[float]]:
    """Cyclic coordinate descent for the centered, slope-only problem.

    Minimizes ``sum((yc - Xs b)^2) + lam*(alpha*sum|b| + (1-alpha)*sum b^2)``
    with the update

        b_j <- S(sum_i x_ij r_i^(j), lam*alpha/2) / (sum_i x_ij^2 + lam*(1-alpha))

    where ``r^(j)`` is the partial residual excluding j and
    ``S(z, g) = sign(z) * max(|z| - g, 0)``.  Gradients are maintained
    through the precomputed Gram matrix, so an untouched coordinate costs
    O(1); after each full cycle the sweep narrows to the nonzero set
    until it stabilizes, then the full cycle re-checks every coordinate.
    Convergence is a full cycle whose largest coefficient change is at
    most ``tol``.

    Once the nonzero set stabilizes, the sign-fixed restricted problem is
    a plain quadratic; its exact solve is applied whenever it keeps the
    signs and lowers the objective, which cuts the slow tail of ill-
    conditioned problems to a handful of sweeps.  Convergence is still
    certified only by a full cycle within ``tol``.

    Returns ``(beta, converged, n_sweeps, objective_history)``; the
    history holds the objective after each sweep (full or narrowed) and
    is non-increasing.
    """
    p = Xs.shape[1]
    beta = np.zeros(p) if beta0 is None else np.asarray(beta0, dtype=float).copy()
    gram = Xs.T @ Xs
    q = Xs.T @ yc
    y_ss = float(yc @ yc)
    denom = np.diag(gram) + lam * (1.0 - alpha)
    thresh = lam * alpha / 2.0
    grad = q - gram @ beta  # grad[j] = sum_i x_ij r_i at the current beta
    gram_diag = np.diag(gram).copy()

    def objective() -> float:
        rss = y_ss - 2.0 * float(beta @ q) + float(beta @ (gram @ beta))
        return rss + lam * (
            alpha * float(np.abs(beta).sum()) + (1.0 - alpha) * float(beta @ beta)
        )

    def sweep(indices) -> float:
        nonlocal grad
        max_delta = 0.0
        for j in indices:
            if denom[j] <= 0.0:
                continue  # zero-variance column under pure lasso: keep b_j = 0
            bj = beta[j]
            rho = grad[j] + gram_diag[j] * bj  # partial residual correlation
            if thresh > 0.0:
                mag = abs(rho) - thresh
                bnew = math.copysign(mag, rho) / denom[j] if mag > 0.0 else 0.0
            else:
                bnew = rho / denom[j]
            if bnew != bj:
                grad -= gram[j] * (bnew - bj)
                beta[j] = bnew
                delta = abs(bnew - bj)
                if delta > max_delta:
                    max_delta = delta
        return max_delta

    def try_restricted_solve(active: np.ndarray) -> bool:
        """Solve the sign-fixed problem on ``active`` exactly; commit if valid."""
        nonlocal grad
        signs = np.sign(beta[active])
        sub = gram[np.ix_(active, active)] + lam * (1.0 - alpha) * np.eye(len(active))
        try:
            solution = solve_spd(sub, q[active] - thresh * signs)
        except SingularDesign:
            return False
        if np.any(solution * signs < 0.0):
            return False
        before = objective()
        saved = beta[active].copy()
        beta[active] = solution
        if objective() > before:
            beta[active] = saved
            return False
        grad = q - gram @ beta
        return True

    everything = range(p)
    history: list[float] = []
    converged = False
    sweeps = 0
    while sweeps < max_iter:
        sweeps += 1
        max_delta = sweep(everything)
        if not math.isfinite(max_delta):
            raise NonFiniteEncountered(f"coordinate descent diverged at sweep {sweeps}")
        history.append(objective())
        if max_delta <= tol:
            converged = True
            break
        active = np.flatnonzero(beta)
        if len(active):
            try_restricted_solve(active)
        while sweeps < max_iter and 0 < len(active) < p:
            sweeps += 1
            max_delta = sweep(active)
            if not math.isfinite(max_delta):
                raise NonFiniteEncountered(
                    f"coordinate descent diverged at sweep {sweeps}"
                )
            history.append(objective())
            if max_delta <= tol:
                break
            new_active = np.flatnonzero(beta)
            if len(new_active) < len(active):
                active = new_active
                if len(active):
                    try_restricted_solve(active)
    return beta, converged, sweeps, history


def fit_elastic_net(
    problem: DesignProblem,
    penalty: PenaltySpec,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    standardize: bool = True,
    warm_start: CoefficientSet | None = None,
) -> CoefficientSet:
    """Elastic-net fit by cyclic coordinate descent.

    ``penalty.alpha=1`` gives the lasso, ``penalty.alpha=0`` the ridge
    penalty (the result then matches :func:`fit_ridge`).  ``warm_start``
    seeds the slopes from a previous fit of the same design (used along
    regularization paths).  Hitting ``max_iter`` is not an error: the
    best iterate is returned with ``converged=False``.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    Xs, means, scales = _standardize(problem.X, scale=standardize)
    y_mean = problem.y.mean()
    yc = problem.y - y_mean
    beta0 = None
    if warm_start is not None:
        if warm_start.p != problem.p:
            raise ValueError(
                f"warm start has {warm_start.p} coefficients, problem has {problem.p}"
            )
        beta0 = warm_start.betas * scales  # back to the standardized scale
    beta_std, converged, sweeps, _ = coordinate_descent(
        Xs, yc, penalty.lam, penalty.alpha, tol, max_iter, beta0=beta0
    )
    if not np.isfinite(beta_std).all():
        raise NonFiniteEncountered("coordinate descent produced non-finite coefficients")
    return _back_transform(
        beta_std, y_mean, means, scales, converged=converged, n_sweeps=sweeps
    )


def predict_linear(coeffs: CoefficientSet, X_new: np.ndarray) -> np.ndarray:
    """Evaluate ``b0 + X @ betas`` for an m x p matrix."""
    X = np.asarray(X_new, dtype=float)
    if X.ndim != 2 or X.shape[1] != coeffs.p:
        raise ValueError(
            f"predictor matrix has shape {X.shape}, expected (m, {coeffs.p})"
        )
    return coeffs.intercept + X @ coeffs.betas


def lasso_lambda_max(X: np.ndarray, y: np.ndarray, alpha: float = 1.0) -> float:
    """Smallest penalty with an all-zero lasso solution, on standardized predictors.

    ``2 * max_j |sum_i xs_ij (y_i - mean(y))| / max(alpha, 0.001)``; for
    ``alpha < 1`` the same quantity scaled by ``1/alpha`` (floored at
    0.001) is the conventional grid top.
    """
    Xs, _, _ = _standardize(np.asarray(X, dtype=float), scale=True)
    yc = np.asarray(y, dtype=float)
    yc = yc - yc.mean()
    return 2.0 * float(np.max(np.abs(Xs.T @ yc))) / max(alpha, 0.001)
