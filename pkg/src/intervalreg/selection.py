"""Penalty-weight selection: grids, k-fold cross-validation, coefficient paths.

Cross-validation shuffles row indices with a seeded PCG64 generator
(``numpy.random.default_rng``), so a fixed seed makes the whole
procedure reproducible.  The held-out loss is the mean of squared lower
and upper endpoint errors, ``(RMSE_L^2 + RMSE_U^2) / 2``; for
center-and-range methods one shared lambda drives both the midpoint and
the half-range fit (independent range selection is available through
``component="range"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite, sqrt

import numpy as np

from .models import (
    FittedModel,
    MethodSpec,
    fit,
    predict,
    predict_components,
)
from .solvers import (
    SUPPORT_TOL,
    CoefficientSet,
    DesignProblem,
    PenaltySpec,
    fit_elastic_net,
    fit_ridge,
    lasso_lambda_max,
)
from .tables import IntervalTable, response_bounds, to_center_range

COMPONENTS = ("interval", "center", "range")


class ZeroVarianceResponse(ValueError):
    """The response carries no signal, so the grid top would be zero."""


@dataclass(frozen=True)
class LambdaGrid:
    """Strictly descending penalty weights (an optional trailing zero is legal)."""

    values: tuple[float, ...]
    generation: str = "explicit"  # "auto" | "explicit"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("grid needs at least one value")
        for v in vals:
            if not (isfinite(v) and v >= 0.0):
                raise ValueError(f"grid values must be finite and >= 0, got {v}")
        if any(a <= b for a, b in zip(vals, vals[1:])):
            raise ValueError("grid must be strictly descending")
        if any(v == 0.0 for v in vals[:-1]):
            raise ValueError("only the terminal grid value may be zero")
        if self.generation not in ("auto", "explicit"):
            raise ValueError(f"unknown generation tag {self.generation!r}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


def make_lambda_grid(X: np.ndarray, y: np.ndarray, alpha: float, n_points: int = 100) -> LambdaGrid:
    """Log-spaced grid from the all-zero-solution lambda down to a small multiple.

    The top value is ``2 * max_j |sum_i xs_ij (y_i - mean(y))| / max(alpha, 0.001)``
    on standardized predictors, the smallest weight with an all-zero lasso
    solution when ``alpha=1``.  The bottom is ``eps`` times the top,
    ``eps = 1e-4`` when n > p, else ``1e-2``.
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if n_points < 2:
        raise ValueError(f"need at least 2 grid points, got {n_points}")
    X = np.asarray(X, dtype=float)
    lam_max = lasso_lambda_max(X, y, alpha)
    if lam_max <= 0.0:
        raise ZeroVarianceResponse(
            "response has no variation around its mean (lambda_max = 0)"
        )
    eps = 1e-4 if X.shape[0] > X.shape[1] else 1e-2
    values = np.geomspace(lam_max, eps * lam_max, n_points)
    return LambdaGrid(tuple(values), generation="auto")


@dataclass(frozen=True, eq=False)
class CvResult:
    """Per-lambda cross-validation curve and the two chosen weights."""

    grid: LambdaGrid
    mean_loss: np.ndarray
    std_error: np.ndarray
    lambda_min: float
    lambda_1se: float
    seed: int
    folds: int
    nonzero: tuple[int, ...]

    def __post_init__(self):
        if len(self.mean_loss) != len(self.grid) or len(self.std_error) != len(self.grid):
            raise ValueError("loss vectors must match the grid length")
        if self.lambda_1se < self.lambda_min:
            raise ValueError("lambda_1se must be >= lambda_min")


def _spec_with_lambda(spec: MethodSpec, lam: float) -> MethodSpec:
    return MethodSpec(
        spec.family, spec.penalty, lambda_center=lam, lambda_range=None,
        alpha=spec.alpha,
    )


def _holdout_loss(
    model: FittedModel, test: IntervalTable, component: str
) -> float:
    y_lo, y_hi = response_bounds(test)
    if component == "interval":
        pred = predict(model, test)
        return float(np.mean(((y_lo - pred.lower) ** 2 + (y_hi - pred.upper) ** 2) / 2.0))
    y_center, y_range = (y_lo + y_hi) / 2.0, (y_hi - y_lo) / 2.0
    p_center, p_range = predict_components(model, test)
    if component == "center":
        return float(np.mean((y_center - p_center) ** 2))
    return float(np.mean((y_range - p_range) ** 2))


def cross_validate(
    table: IntervalTable,
    spec: MethodSpec,
    grid: LambdaGrid | None = None,
    k: int | None = None,
    seed: int = 0,
    n_points: int = 100,
    component: str = "interval",
    tol: float = 1e-7,
    max_iter: int = 100_000,
) -> CvResult:
    """k-fold cross-validation of the penalty weight for one method.

    Rows are shuffled by a generator seeded with ``seed`` and split into k
    near-equal folds; each grid lambda is fit on k-1 folds and scored on
    the held-out one.  ``k=None`` means 10 folds, reduced to n on small
    tables.  ``lambda_min`` minimizes the mean loss and ``lambda_1se`` is
    the largest lambda within one standard error of that minimum.
    ``component`` switches the held-out loss between the full interval
    (default), midpoints only, or half-ranges only.
    """
    if spec.penalty == "none":
        raise ValueError("cross-validation needs a penalized method")
    if component not in COMPONENTS:
        raise ValueError(f"component must be one of {COMPONENTS}, got {component!r}")
    n = table.n_rows
    if k is None:
        k = 10 if n >= 10 else n
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n folds, got k={k}, n={n}")
    if grid is None:
        view = to_center_range(table)
        if component == "range":
            X, y = view.halfranges_X, view.halfranges_y
        else:
            X, y = view.centers_X, view.centers_y
        grid = make_lambda_grid(X, y, spec.effective_alpha, n_points)

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    folds = np.array_split(perm, k)

    losses = np.empty((k, len(grid)))
    for fi, test_idx in enumerate(folds):
        if len(test_idx) == 0:
            raise ValueError(f"fold {fi} has zero test rows")
        mask = np.ones(n, dtype=bool)
        mask[test_idx] = False
        train = table.take(np.flatnonzero(mask))
        test = table.take(test_idx)
        warm = None  # chained down the descending grid, reset per fold
        for li, lam in enumerate(grid.values):
            model = fit(
                table=train, spec=_spec_with_lambda(spec, lam),
                tol=tol, max_iter=max_iter, warm_start=warm,
            )
            warm = model
            losses[fi, li] = _holdout_loss(model, test, component)

    mean_loss = losses.mean(axis=0)
    std_error = losses.std(axis=0, ddof=1) / sqrt(k)
    i_min = int(np.argmin(mean_loss))  # ties resolve to the largest lambda
    lambda_min = grid.values[i_min]
    cutoff = mean_loss[i_min] + std_error[i_min]
    i_1se = int(np.flatnonzero(mean_loss <= cutoff)[0])
    lambda_1se = grid.values[i_1se]

    path_component = "range" if component == "range" else "center"
    path = coefficient_path(
        table, spec, grid, component=path_component, tol=tol, max_iter=max_iter
    )
    return CvResult(
        grid, mean_loss, std_error, lambda_min, lambda_1se,
        seed=seed, folds=k, nonzero=path.nonzero,
    )


@dataclass(frozen=True)
class AlphaSweepResult:
    """Winner of an alpha sweep plus the per-alpha curves."""

    alpha: float
    lam: float
    loss: float
    per_alpha: tuple[tuple[float, "CvResult"], ...]


def alpha_sweep(
    table: IntervalTable,
    family: str,
    alphas,
    k: int | None = None,
    seed: int = 0,
    n_points: int = 100,
    component: str = "interval",
) -> AlphaSweepResult:
    """Cross-validate an elastic net per alpha; return the best (alpha, lambda).

    Ties in mean loss break toward larger alpha, then larger lambda.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("alpha sweep needs at least one alpha")
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {a}")
    results = []
    best = None
    for a in alphas:
        spec = MethodSpec(family, "elastic_net", alpha=a)
        cv = cross_validate(
            table, spec, k=k, seed=seed, n_points=n_points, component=component
        )
        i_min = int(np.argmin(cv.mean_loss))
        cand = (float(cv.mean_loss[i_min]), a, cv.lambda_min)
        results.append((a, cv))
        if (
            best is None
            or cand[0] < best[0]
            or (cand[0] == best[0] and (cand[1], cand[2]) > (best[1], best[2]))
        ):
            best = cand
    return AlphaSweepResult(best[1], best[2], best[0], tuple(results))


@dataclass(frozen=True, eq=False)
class CoefficientPath:
    """Per-lambda coefficients of one design, on the original predictor scale."""

    grid: LambdaGrid
    intercepts: np.ndarray          # (len(grid),)
    coefficients: np.ndarray        # (len(grid), p)
    predictor_names: tuple[str, ...]

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(
            int(np.sum(np.abs(row) > SUPPORT_TOL)) for row in self.coefficients
        )


def coefficient_path(
    table: IntervalTable,
    spec: MethodSpec,
    grid: LambdaGrid,
    component: str = "center",
    tol: float = 1e-7,
    max_iter: int = 100_000,
) -> CoefficientPath:
    """Coefficients along a descending grid, warm-started between points.

    ``component`` picks the design: midpoints (default) or half-ranges.
    Each lasso / elastic-net fit starts from the previous (larger-lambda)
    solution; ridge points use the closed form.  Support restriction does
    not apply here, the path is the plain per-design solution.
    """
    if spec.penalty == "none":
        raise ValueError("coefficient paths need a penalized method")
    if component not in ("center", "range"):
        raise ValueError(f"component must be 'center' or 'range', got {component!r}")
    view = to_center_range(table)
    if component == "center":
        X, y = view.centers_X, view.centers_y
    else:
        X, y = view.halfranges_X, view.halfranges_y
    problem = DesignProblem(X, y)
    alpha = spec.effective_alpha
    intercepts = np.empty(len(grid))
    coefs = np.empty((len(grid), X.shape[1]))
    previous: CoefficientSet | None = None
    for i, lam in enumerate(grid.values):
        if spec.penalty == "ridge":
            c = fit_ridge(problem, lam)
        else:
            c = fit_elastic_net(
                problem, PenaltySpec(lam, alpha),
                tol=tol, max_iter=max_iter, warm_start=previous,
            )
            previous = c
        intercepts[i] = c.intercept
        coefs[i] = c.betas
    return CoefficientPath(grid, intercepts, coefs, view.predictor_names)
