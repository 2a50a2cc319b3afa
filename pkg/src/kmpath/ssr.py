"""Stepwise sparse regression with k-fold cross-validation.

SSR is greedy backward elimination: fit least squares on the active columns,
zero the coefficient of smallest magnitude, refit on the rest, repeat. The
solution after ``q`` eliminations is called q-sparse. Cross-validation picks
``q`` by held-out squared error, replacing the hand-tuned threshold of
sequentially thresholded least squares.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, UnderdeterminedError
from .model import PolynomialDictionary, build_design_matrix


@dataclass(frozen=True)
class SparseSolution:
    active: tuple[int, ...]
    coeffs: np.ndarray


@dataclass(frozen=True)
class SparsityPath:
    """SSR solutions for ``q = 0 .. M-1`` zeroed coefficients."""

    solutions: tuple[SparseSolution, ...]

    def __getitem__(self, q) -> SparseSolution:
        return self.solutions[q]

    def __len__(self):
        return len(self.solutions)


@dataclass(frozen=True)
class CvReport:
    delta: np.ndarray
    k: int
    fold_seed: int
    selected_q: int
    selected_coeffs: np.ndarray
    path: SparsityPath
    delta_se: np.ndarray = field(repr=False, default=None)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.selected_coeffs))


def least_squares(X, y) -> np.ndarray:
    """Minimum-norm least-squares solution of ``X b ~ y`` (SVD based)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: X {X.shape}, y {y.shape}")
    if X.shape[0] < X.shape[1]:
        raise UnderdeterminedError(f"{X.shape[0]} rows cannot determine {X.shape[1]} coefficients")
    b, *_ = np.linalg.lstsq(X, y, rcond=None)
    return b


def _fit_active(X, y, active):
    b = np.zeros(X.shape[1])
    b[list(active)] = least_squares(X[:, list(active)], y)
    return b


def ssr_step(X, y, active):
    """Drop the active column whose least-squares coefficient is smallest in magnitude.

    Ties go to the lowest column index. Returns the reduced active set as a
    sorted tuple.
    """
    active = tuple(sorted(int(i) for i in active))
    if not active:
        raise ContractViolation("ssr_step needs a non-empty active set")
    if len(active) == 1:
        raise ContractViolation("cannot eliminate the last active column")
    b = least_squares(np.asarray(X, dtype=float)[:, list(active)], y)
    drop = int(np.argmin(np.abs(b)))  # argmin returns the first minimum
    return active[:drop] + active[drop + 1:]


def ssr_path(X, y, q_max=None) -> SparsityPath:
    """Run SSR from the dense fit down to ``q_max`` eliminations (default ``M - 1``)."""
    X = np.asarray(X, dtype=float)
    M = X.shape[1]
    q_max = M - 1 if q_max is None else q_max
    if not 0 <= q_max < M:
        raise ContractViolation(f"q must lie in [0, {M - 1}], got {q_max}")
    active = tuple(range(M))
    sols = []
    for q in range(q_max + 1):
        b = least_squares(X[:, list(active)], y)
        coeffs = np.zeros(M)
        coeffs[list(active)] = b
        sols.append(SparseSolution(active, coeffs))
        if q < q_max:
            drop = int(np.argmin(np.abs(b)))
            active = active[:drop] + active[drop + 1:]
    return SparsityPath(tuple(sols))


def fold_partition(n_rows, k, fold_seed):
    """Shuffle ``range(n_rows)`` with ``fold_seed`` and cut it into ``k`` near-equal folds."""
    if k < 2:
        raise ContractViolation(f"need at least two folds, got k={k}")
    if n_rows < k:
        raise ContractViolation(f"{n_rows} rows cannot be split into {k} folds")
    perm = np.random.default_rng(fold_seed).permutation(n_rows)
    return [np.sort(f) for f in np.array_split(perm, k)]


def fold_errors(X, y, folds, q_max=None):
    """Held-out squared error per fold and sparsity level, shape ``(k, q_max + 1)``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    M = X.shape[1]
    q_max = M - 1 if q_max is None else q_max
    err = np.empty((len(folds), q_max + 1))
    all_rows = np.arange(X.shape[0])
    for i, test in enumerate(folds):
        train = np.setdiff1d(all_rows, test, assume_unique=True)
        path = ssr_path(X[train], y[train], q_max)
        for q, sol in enumerate(path.solutions):
            r = y[test] - X[test] @ sol.coeffs
            err[i, q] = r @ r
    return err


def cv_score(X, y, q, k=10, fold_seed=0) -> float:
    """CV score ``delta`` at sparsity ``q``.

    ``delta**2 = (1/k) sum_i ||y[B_i] - X[B_i] SSR(X[C_i], y[C_i])_q||**2``
    where ``B_i`` are the folds and ``C_i`` their complements.
    """
    M = np.asarray(X).shape[1]
    if not 0 <= q < M:
        raise ContractViolation(f"q must lie in [0, {M - 1}], got {q}")
    folds = fold_partition(np.asarray(X).shape[0], k, fold_seed)
    err = fold_errors(X, y, folds, q)
    return float(np.sqrt(err[:, q].mean()))


def _row_weights(X, y, weights):
    if weights is None:
        return np.asarray(X, dtype=float), np.asarray(y, dtype=float)
    w = np.sqrt(np.asarray(weights, dtype=float))
    return np.asarray(X, dtype=float) * w[:, None], np.asarray(y, dtype=float) * w


def select_model(X, y, k=10, fold_seed=0, one_se=False, weights=None) -> CvReport:
    """Score every sparsity level and refit the winner on all rows.

    The winner minimises ``delta``; ties go to the sparser model. With
    ``one_se`` the sparsest level within one standard error of the minimum is
    taken instead. ``weights`` (e.g. bin counts) rescale rows; by default
    every row counts equally.
    """
    Xw, yw = _row_weights(X, y, weights)
    M = Xw.shape[1]
    folds = fold_partition(Xw.shape[0], k, fold_seed)
    err = fold_errors(Xw, yw, folds)
    msq = err.mean(axis=0)
    delta = np.sqrt(msq)
    se = err.std(axis=0, ddof=1) / np.sqrt(len(folds))
    best = np.flatnonzero(delta == delta.min())[-1]
    if one_se:
        ok = np.flatnonzero(msq <= msq[best] + se[best])
        best = ok[-1]
    path = ssr_path(Xw, yw, M - 1)
    return CvReport(
        delta=delta,
        k=k,
        fold_seed=fold_seed,
        selected_q=int(best),
        selected_coeffs=path[int(best)].coeffs.copy(),
        path=path,
        delta_se=se,
    )


@dataclass(frozen=True)
class DegreeScore:
    degree: int
    delta: float
    report: CvReport


def dictionary_size_scan(x, y, max_degrees, k=10, fold_seed=0, one_se=False, weights=None):
    """Selected CV score for each candidate dictionary degree.

    ``x`` are bin centres (or raw states), ``y`` the matching targets.
    """
    if len(max_degrees) == 0:
        raise ContractViolation("max_degrees must be non-empty")
    out = []
    for n in max_degrees:
        X = build_design_matrix(x, PolynomialDictionary(int(n)))
        rep = select_model(X, y, k=k, fold_seed=fold_seed, one_se=one_se, weights=weights)
        out.append(DegreeScore(int(n), float(rep.delta[rep.selected_q]), rep))
    return out
