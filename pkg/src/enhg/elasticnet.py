"""LARS-EN path solver and the column-wise robust matrix elastic net.

The solver works on

    0.5 * ||x - B z||^2 + l2 * ||z||^2 + l1 * ||z||_1

which is a lasso on the ridge-augmented design ``[B; sqrt(2 l2) I]``. Only
the Gram matrix ``B^T B + 2 l2 I`` and the correlations ``B^T x`` of the
augmented system are needed, so the augmentation is never formed. The path
is traced by the LARS homotopy with the lasso modification: atoms join when
their correlation reaches the current ``l1`` level and leave when their
coefficient crosses zero.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .datio import check_sample_matrix

CORRELATION_FLOOR = 1e-12
# Schur complement (relative) below which a joining atom is collinear with
# the active set
_RANK_TOL = 1e-10


class SolverError(ValueError):
    """Invalid solver input; ``column`` is set when raised per sample."""

    def __init__(self, message, column=None):
        if column is not None:
            message = f"column {column}: {message}"
        super().__init__(message)
        self.column = column


@dataclass
class Knot:
    l1_weight: float
    l1_budget: float
    coef: np.ndarray
    active: list[int]


@dataclass
class ElasticNetPath:
    """Piecewise-linear LARS-EN solution path.

    ``knots[0]`` is the all-zero solution at ``l1_weight = max |B^T x|``;
    every later knot is where the active set changed (or where the path was
    stopped). Between knots the coefficients are linear in both the l1
    weight and the l1 norm.
    """

    knots: list[Knot]
    l2_weight: float
    n_atoms: int
    annotations: list[str] = field(default_factory=list)

    @property
    def l1_budgets(self) -> np.ndarray:
        return np.array([k.l1_budget for k in self.knots])

    @property
    def l1_weights(self) -> np.ndarray:
        return np.array([k.l1_weight for k in self.knots])

    @property
    def coefs(self) -> np.ndarray:
        """Coefficients as an ``(n_knots, n_atoms)`` array."""
        return np.array([k.coef for k in self.knots]).reshape(len(self.knots), self.n_atoms)

    @property
    def path_fraction(self) -> np.ndarray:
        """``||z||_1 / max ||z||_1`` per knot (all zeros for a trivial path)."""
        budgets = self.l1_budgets
        top = budgets.max()
        return budgets / top if top > 0 else np.zeros_like(budgets)

    def coef_at(self, l1_weight) -> np.ndarray:
        """Coefficients at a given l1 weight, interpolated between the bracketing knots."""
        knots = self.knots
        if l1_weight >= knots[0].l1_weight:
            return np.zeros(self.n_atoms)
        for left, right in zip(knots, knots[1:]):
            if right.l1_weight <= l1_weight:
                span = left.l1_weight - right.l1_weight
                t = 0.0 if span <= 0 else (left.l1_weight - l1_weight) / span
                return (1.0 - t) * left.coef + t * right.coef
        if l1_weight < knots[-1].l1_weight - 1e-12 * max(1.0, knots[0].l1_weight):
            raise SolverError(
                f"path ends at l1 weight {knots[-1].l1_weight:.6g}; "
                f"cannot evaluate at {l1_weight:.6g}"
            )
        return knots[-1].coef.copy()


def _validate(dictionary, response):
    B = np.asarray(dictionary, dtype=np.float64)
    x = np.asarray(response, dtype=np.float64)
    if B.ndim != 2 or x.ndim != 1 or B.shape[0] != x.shape[0]:
        raise SolverError(f"shape mismatch: dictionary {B.shape}, response {x.shape}")
    if B.shape[0] < 1 or B.shape[1] < 1:
        raise SolverError("dictionary needs d >= 1 and m >= 1")
    if not (np.all(np.isfinite(B)) and np.all(np.isfinite(x))):
        raise SolverError("non-finite entries in dictionary or response")
    zero = np.flatnonzero(np.linalg.norm(B, axis=0) == 0)
    if zero.size:
        raise SolverError(f"zero-norm dictionary column(s): {zero.tolist()}")
    return B, x


def lars_en_path(dictionary, response, l2_weight, *, max_active=None, l1_budget=None,
                 l1_weight=None, full_path=False) -> ElasticNetPath:
    """Trace the elastic-net path with LARS-EN.

    Parameters
    ----------
    dictionary : (d, m) array
    response : (d,) array
    l2_weight : float
        Ridge weight ``l2 >= 0``.
    max_active : int, optional
        Stop when this many atoms are active. Defaults to ``min(d, m)``
        unless another stopping rule is given.
    l1_budget : float, optional
        Stop exactly where ``||z||_1`` reaches this value.
    l1_weight : float, optional
        Stop exactly at this l1 weight.
    full_path : bool
        Run until the l1 weight reaches zero (or the correlations vanish).
    """
    B, x = _validate(dictionary, response)
    if l2_weight < 0 or not np.isfinite(l2_weight):
        raise SolverError(f"l2_weight must be finite and >= 0, got {l2_weight}")
    gram = B.T @ B
    gram[np.diag_indices_from(gram)] += 2.0 * l2_weight
    corr = B.T @ x
    if max_active is None and l1_budget is None and l1_weight is None and not full_path:
        max_active = min(B.shape)
    return _homotopy(gram, corr, l2_weight, max_active, l1_budget, l1_weight)


def _homotopy(gram, corr0, l2_weight, max_active=None, l1_budget=None, l1_target=None):
    m = corr0.shape[0]
    scale = max(1.0, float(np.abs(corr0).max()))
    tol = 1e-12 * scale
    lam = float(np.abs(corr0).max())
    knots = [Knot(lam, 0.0, np.zeros(m), [])]
    path = ElasticNetPath(knots, float(l2_weight), m)
    if lam < CORRELATION_FLOOR:
        return path

    floor = CORRELATION_FLOOR
    if l1_target is not None:
        floor = max(floor, l1_target)
    active: list[int] = []
    signs = np.zeros(0)
    skipped: set[int] = set()
    coef = np.zeros(m)
    just_dropped = None

    def try_add(j):
        # collinear atoms (possible only when l2 == 0) are skipped for good
        if active:
            g = gram[np.ix_(active, active)]
            v = gram[active, j]
            schur = gram[j, j] - v @ np.linalg.solve(g, v)
        else:
            schur = gram[j, j]
        if schur <= _RANK_TOL * gram[j, j]:
            skipped.add(j)
            path.annotations.append(
                f"atom {j} skipped at l1 weight {lam:.6g}: collinear with active set"
            )
            return False
        active.append(j)
        return True

    # admit the lowest-index atom attaining the maximal correlation
    c = corr0 - gram @ coef
    first = int(np.flatnonzero(np.abs(c) >= lam - tol)[0])
    try_add(first)
    just_added = first

    for _ in range(20 * (m + 5)):
        if max_active is not None and len(active) >= max_active:
            break
        if lam <= floor + tol:
            break
        signs = np.sign(corr0[active] - gram[active] @ coef)
        g_aa = gram[np.ix_(active, active)]
        direction = np.linalg.solve(g_aa, signs)
        a = gram[:, active] @ direction
        c = corr0 - gram @ coef

        step = lam - floor
        event = ("end", None)
        inactive = [j for j in range(m) if j not in active and j not in skipped]
        # an atom that just left (or joined) must not bounce back at t ~ 0
        eps = 1e-9 * lam
        for j in inactive:
            for num, den in ((lam - c[j], 1.0 - a[j]), (lam + c[j], 1.0 + a[j])):
                if den > 1e-14:
                    t = max(num / den, 0.0)
                    if j == just_dropped and t <= eps:
                        continue
                    if t < step:
                        step, event = t, ("add", j)
        for pos, j in enumerate(active):
            if direction[pos] * signs[pos] >= 0:
                continue
            t = max(-coef[j] / direction[pos], 0.0)
            if j == just_added and t <= eps:
                continue
            if t < step:
                step, event = t, ("drop", j)
        if l1_budget is not None:
            slope = float(signs @ direction)
            current = float(np.abs(coef).sum())
            if slope > 0:
                t = (l1_budget - current) / slope
                if t < step:
                    step, event = max(t, 0.0), ("budget", None)

        new_lam = lam - step
        coef = np.zeros(m)
        coef[active] = np.linalg.solve(g_aa, corr0[active] - new_lam * signs)
        lam = new_lam
        just_added = just_dropped = None
        kind, j = event
        if kind == "drop":
            coef[j] = 0.0
            active.remove(j)
            just_dropped = j
        knots.append(Knot(lam, float(np.abs(coef).sum()), coef.copy(), list(active)))
        if kind == "add":
            if try_add(j):
                just_added = j
                knots[-1].active = list(active)
        elif kind in ("budget", "end"):
            break
        if not active:
            break
        if float(np.abs(corr0 - gram @ coef).max()) < CORRELATION_FLOOR:
            break
    else:
        raise SolverError("LARS-EN path did not terminate (cycling active set)")
    return path


def elastic_net_solve(dictionary, response, l1_weight, l2_weight, rescale=False) -> np.ndarray:
    """Minimize ``0.5||x - Bz||^2 + l2||z||^2 + l1||z||_1`` by LARS-EN.

    With ``rescale=True`` the naive coefficients are multiplied by
    ``1 + 2 * l2`` (the "corrected" elastic net of the LARS-EN literature
    under this objective's scaling).
    """
    if not l1_weight > 0:
        raise SolverError(f"l1_weight must be > 0, got {l1_weight}")
    path = lars_en_path(dictionary, response, l2_weight, l1_weight=l1_weight)
    z = path.coef_at(l1_weight)
    return z * (1.0 + 2.0 * l2_weight) if rescale else z


def _solve_from_gram(gram, corr, l1_weight, l2_weight):
    path = _homotopy(gram, corr, l2_weight, l1_target=l1_weight)
    return path.coef_at(l1_weight)


def kkt_residual(dictionary, response, coef, l1_weight, l2_weight) -> float:
    """Largest violation of the elastic-net stationarity conditions.

    Active atoms need ``b_i^T r - 2 l2 z_i = l1 * sign(z_i)``; inactive atoms
    need ``|b_i^T r| <= l1``. Returns 0 for an exact minimizer.
    """
    B = np.asarray(dictionary, dtype=np.float64)
    z = np.asarray(coef, dtype=np.float64)
    grad = B.T @ (np.asarray(response, dtype=np.float64) - B @ z)
    on = z != 0
    worst = 0.0
    if on.any():
        worst = float(np.abs(grad[on] - 2.0 * l2_weight * z[on] - l1_weight * np.sign(z[on])).max())
    if (~on).any():
        worst = max(worst, float(np.maximum(np.abs(grad[~on]) - l1_weight, 0.0).max()))
    return worst


def elastic_net_objective(dictionary, response, coef, l1_weight, l2_weight) -> float:
    B = np.asarray(dictionary, dtype=np.float64)
    r = np.asarray(response, dtype=np.float64) - B @ coef
    return 0.5 * float(r @ r) + l2_weight * float(coef @ coef) + l1_weight * float(np.abs(coef).sum())


# --------------------------------------------------------------------------
# robust matrix elastic net

def model_to_solver_weights(lam, gamma):
    """Map the (lambda, gamma) pair of the unsquared-residual model to (l1, l2).

    Dividing the per-sample objective by ``gamma`` gives ``l1 = 1/gamma`` and
    ``l2 = lambda/gamma`` once the residual term is taken as the usual
    half squared loss.
    """
    if not gamma > 0:
        raise SolverError(f"gamma must be > 0, got {gamma}")
    if lam < 0:
        raise SolverError(f"lambda must be >= 0, got {lam}")
    return 1.0 / gamma, lam / gamma


def _thread_count(threads):
    if threads is None:
        env = os.environ.get("ENHG_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


@dataclass(frozen=True)
class Decomposition:
    """Result of the robust matrix elastic net: ``X = X Z + S``."""

    X: np.ndarray
    Z: np.ndarray
    S: np.ndarray
    l1_weight: float
    l2_weight: float

    @property
    def clean(self) -> np.ndarray:
        """Recovered clean data ``X0 = X Z``."""
        return self.X @ self.Z


def robust_matrix_elastic_net(X, lam=0.01, gamma=0.18, *, l1_weight=None, l2_weight=None,
                              threads=None, rescale=False) -> Decomposition:
    """Column-by-column elastic-net self-representation of ``X``.

    Each sample ``x_i`` is coded over the dictionary of all other samples.
    The solver weights come from :func:`model_to_solver_weights` unless
    ``l1_weight``/``l2_weight`` are given explicitly. Columns are
    independent and may be solved by a thread pool (``threads`` or the
    ``ENHG_THREADS`` environment variable); the result does not depend on
    scheduling.
    """
    X = check_sample_matrix(X)
    n = X.shape[1]
    if n < 3:
        raise SolverError(f"need at least 3 samples, got {n}")
    if (l1_weight is None) != (l2_weight is None):
        raise SolverError("give both l1_weight and l2_weight, or neither")
    if l1_weight is None:
        l1_weight, l2_weight = model_to_solver_weights(lam, gamma)
    if not l1_weight > 0 or l2_weight < 0:
        raise SolverError(f"need l1 > 0 and l2 >= 0, got l1={l1_weight}, l2={l2_weight}")
    zero = np.flatnonzero(np.linalg.norm(X, axis=0) == 0)
    if zero.size:
        raise SolverError(f"zero-norm sample column(s): {zero.tolist()}")

    gram_full = X.T @ X

    def solve_column(i):
        keep = np.r_[0:i, i + 1:n]
        gram = gram_full[np.ix_(keep, keep)]
        gram[np.diag_indices_from(gram)] += 2.0 * l2_weight
        try:
            z = _solve_from_gram(gram, gram_full[keep, i], l1_weight, l2_weight)
        except (SolverError, np.linalg.LinAlgError) as exc:
            raise SolverError(str(exc), column=i) from exc
        col = np.zeros(n)
        col[keep] = z
        return col

    workers = _thread_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(solve_column, range(n)))
    else:
        cols = [solve_column(i) for i in range(n)]
    Z = np.column_stack(cols)
    if rescale:
        Z *= 1.0 + 2.0 * l2_weight
    np.fill_diagonal(Z, 0.0)
    S = X - X @ Z
    return Decomposition(X, Z, S, float(l1_weight), float(l2_weight))
