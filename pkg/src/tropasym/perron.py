"""Numerical Perron eigenpairs of exp(k*A), entirely in log coordinates.

Explicitly exponentiating k*A stops working long before the interesting
asymptotics set in: cross terms like e^{-25000} are absorbed or flushed to
zero, and the iteration silently returns garbage.  Everything here therefore
works on log-domain quantities.  One normalized fixed-point step is

    y  <-  z - z_1,      z_i = logsumexp_j(k*A_ij + y_j),

whose fixed point is the log Perron vector pinned to y_1 = 0, with z_1 the
log Perron root.  Three ingredients make the iteration practical across the
whole k range:

* a lazy (averaged) step, which removes the oscillatory near-(-rho) mode that
  a dominant 2-cycle would otherwise leave undamped;
* an accelerator that squares the log-domain matrix (logsumexp matrix
  products), applying 2^t power-iteration steps at once, which is what closes
  the k-window where the spectral gap of exp(kA) is tiny but the structure is
  still representable in doubles;
* warm starts along a doubling schedule, which carry the eigenvector mixture
  into the regime where double precision can no longer resolve it (the
  carried value is then within O(1/k) of the truth).

Residuals are measured on the k-normalized map, i.e. ||F(y) - y||_inf / k,
which keeps the convergence criterion meaningful uniformly in k: by the
Collatz-Wielandt inequalities a residual r certifies the normalized log
eigenvalue to within r.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FloatPoint, float_point

DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 10**6

# trajectory moves below this are indistinguishable from rounding noise
_MOVE_NOISE = 1e-9


class PerronError(RuntimeError):
    pass


class ConvergenceError(PerronError):
    """Power iteration did not reach the residual tolerance."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"no convergence: residual {residual:.3e} after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


class OracleError(PerronError):
    """The linear-domain float oracle failed or flagged itself unreliable."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class EstimateError(PerronError):
    pass


def _as_matrix(A) -> np.ndarray:
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError("matrix must be square and non-empty")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def _lse_rows(B: np.ndarray) -> np.ndarray:
    m = B.max(axis=1, keepdims=True)
    return m[:, 0] + np.log(np.exp(B - m).sum(axis=1))


def _log_matmul(B: np.ndarray, C: np.ndarray) -> np.ndarray:
    T = B[:, :, None] + C[None, :, :]
    m = T.max(axis=1)
    return m + np.log(np.exp(T - m[:, None, :]).sum(axis=1))


def _solve(kA: np.ndarray, k: float, tol: float, max_iter: int, y0: np.ndarray | None):
    """Core solver; returns (log_rho, y, residual, iterations, converged)."""
    n = kA.shape[0]
    if n == 1:
        return float(kA[0, 0]), np.zeros(1), 0.0, 0, True
    y = np.zeros(n) if y0 is None else np.array(y0, dtype=float)

    def plain(yv):
        return _lse_rows(kA + yv[None, :])

    def lazy_step(yv):
        u = plain(yv)
        res = float(np.abs(u - u[0] - yv).max() / k)
        z = np.logaddexp(u, u[0] + yv) - math.log(2.0)
        return z - z[0], float(u[0]), res

    it = 0
    best_res = math.inf
    best_y = y
    best_s = 0.0

    def lazy_phase(y, budget, stall_window=40):
        """Iterate while genuinely contracting; residual certifies the pre-step point."""
        nonlocal it, best_res, best_y, best_s
        history: list[float] = []
        while budget > 0 and it < max_iter:
            ynew, s, res = lazy_step(y)
            it += 1
            budget -= 1
            if res < best_res:
                best_res, best_y, best_s = res, y, s
            if res < tol:
                return y, True
            history.append(res)
            if len(history) > stall_window and res > 0.75 * history[-stall_window]:
                return ynew, False
            y = ynew
        return y, False

    y, done = lazy_phase(y, 2000)
    if done:
        return best_s, best_y, best_res, it, True

    # accelerator: repeated squaring of the diagonally shifted log matrix,
    # applying 2^t power steps per round.  The shift is certified <= log rho
    # (Collatz-Wielandt lower bound minus log n), which damps the oscillatory
    # near-(-rho) mode without disturbing which cycles are critical.  Rounds
    # are residual-guided: accumulated rounding in the squared matrix doubles
    # per round, so the loop stops as soon as candidates stop improving.
    u = plain(y)
    c0 = float((u - y).min()) - math.log(n) - 1.0
    B = kA.copy()
    idx = np.arange(n)
    B[idx, idx] = np.logaddexp(B[idx, idx], c0)
    x = y.copy()
    # 40 rounds = power 2^40; beyond that, accumulated rounding in the
    # squared matrix (about 2^t * eps) outweighs anything still to gain
    for _ in range(40):
        if it >= max_iter:
            break
        xnew = _lse_rows(B + x[None, :])
        xnew -= xnew[0]
        it += 1
        if not np.all(np.isfinite(xnew)):
            break
        delta = float(np.abs(xnew - x).max())
        x = xnew
        if delta < 1e-12:
            break  # aggregation stabilized
        B = _log_matmul(B, B)
        B -= B.max()

    # polish the accelerated candidate; lazy_phase keeps whichever of the
    # phase-1 and post-squaring iterates certifies the smaller residual
    lazy_phase(x, 400)
    return best_s, best_y, best_res, it, best_res < tol


def log_perron_eigenpair(
    A,
    k: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    start: Sequence[float] | None = None,
) -> tuple[float, FloatPoint, float, int]:
    """Log Perron root and normalized log eigenvector of exp(k*A).

    Returns (log_rho, vector, residual, iterations) with vector pinned to
    first coordinate 0.  The entries e^{k*A_ij} are never materialized.
    Raises ConvergenceError when the residual tolerance is not met; the
    exception carries the last residual.
    """
    M = _as_matrix(A)
    if not (k > 0):
        raise ValueError("k must be positive")
    if not (tol > 0):
        raise ValueError("tol must be positive")
    y0 = None if start is None else np.asarray(list(start), dtype=float)
    if y0 is not None and y0.shape != (M.shape[0],):
        raise ValueError("start vector has wrong length")
    s, y, res, it, ok = _solve(k * M, float(k), tol, max_iter, y0)
    if not ok:
        raise ConvergenceError(res, it)
    return s, float_point(y), res, it


def _converge_linear(M: np.ndarray, x: np.ndarray, squarings: int = 64) -> np.ndarray | None:
    P = M.copy()
    prev = x / x.sum()
    for _ in range(squarings):
        y = P @ prev
        total = y.sum()
        if not np.isfinite(total) or total <= 0.0:
            return None
        y /= total
        if np.abs(y / prev - 1.0).max() < 1e-13:
            return y
        prev = y
        P = P @ P
        m = P.max()
        if not np.isfinite(m) or m <= 0.0:
            return None
        P /= m
    return None


def perron_float_oracle(A, k: float) -> tuple[float, np.ndarray]:
    """Classical linear-domain power iteration on the exponentiated matrix.

    Power steps are applied in bulk by repeated squaring, with a diagonal
    shift so that a dominant 2-cycle cannot stall the iteration.  This is the
    fragile reference path: it fails once exp(k*A) overflows, once entries
    flush to zero (the matrix is no longer positive), or once the result is
    untrustworthy, detected by disagreement between two independent starting
    vectors.  All failures raise OracleError.
    """
    M0 = _as_matrix(A)
    if not (k > 0):
        raise ValueError("k must be positive")
    n = M0.shape[0]
    with np.errstate(over="ignore", under="ignore"):
        M = np.exp(k * M0)
    if not np.all(np.isfinite(M)):
        raise OracleError("overflow: exp(kA) exceeds double range")
    if M.min() <= 0.0:
        raise OracleError("underflow: exp(kA) has entries flushed to zero")
    if n == 1:
        return float(M[0, 0]), np.ones(1)
    shifted = M + np.eye(n) * M.sum(axis=1).max()
    x1 = _converge_linear(shifted, np.ones(n))
    x2 = _converge_linear(shifted, np.linspace(1.0, 2.0, n))
    if x1 is None or x2 is None:
        raise OracleError("power iteration did not converge")
    if np.abs(np.log(x1) - np.log(x2)).max() > 1e-10:
        raise OracleError("unreliable: result depends on the starting vector")
    x = x1
    for _ in range(50):
        xn = M @ x
        xn /= xn.sum()
        done = np.abs(xn / x - 1.0).max() < 1e-15
        x = xn
        if done:
            break
    T = M * x[None, :]
    top = T.max(axis=1)
    if float(((T.sum(axis=1) - top) / top).min()) < 1e-13:
        raise OracleError(
            "unreliable: row structure absorbed below double precision"
        )
    rho = float((M @ x)[0] / x[0])
    return rho, x / x.max()


def row_coupling_mass(A, k: float, point: Sequence[float]) -> float:
    """Smallest row-wise sub-dominant logsumexp mass at the given point.

    Measures how much of the matrix structure is still numerically visible at
    scale k; values near machine epsilon mean the eigenvector mixture is
    frozen and no longer being updated by any double-precision method.
    """
    M = _as_matrix(A)
    y = np.asarray(list(point), dtype=float)
    B = k * M + y[None, :] - y[:, None]
    r = np.exp(B - B.max(axis=1, keepdims=True))
    return float((r.sum(axis=1) - 1.0).min())


@dataclass(frozen=True)
class PerronSample:
    k: float
    log_rho_over_k: float
    point: FloatPoint
    residual: float
    iterations: int


@dataclass(frozen=True)
class FailedSample:
    k: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class PerronTrajectory:
    samples: tuple[PerronSample, ...]
    matrix_hash: str
    failures: tuple[FailedSample, ...] = ()

    def sample_at(self, k: float) -> PerronSample | None:
        for s in self.samples:
            if s.k == k:
                return s
        return None


@dataclass(frozen=True)
class PinfEstimate:
    point: FloatPoint
    error_bound: float
    k_max_used: float

    def to_json_dict(self) -> dict:
        return {
            "point": list(self.point.coords),
            "error_bound": self.error_bound,
            "k_max_used": self.k_max_used,
        }


def matrix_digest(A) -> str:
    M = _as_matrix(A)
    text = ";".join(",".join(repr(x) for x in row) for row in M.tolist())
    return hashlib.sha256(text.encode()).hexdigest()


def trajectory_csv(traj: PerronTrajectory) -> str:
    """CSV serialization: k,lambda_k,coord_1..coord_n,residual,iterations.

    Failed samples keep their k, residual, and iteration count but leave the
    eigenvalue and coordinate cells empty.
    """
    if traj.samples:
        n = traj.samples[0].point.dim
    elif traj.failures:
        n = 0
    else:
        raise ValueError("empty trajectory")
    header = ["k", "lambda_k"] + [f"coord_{i + 1}" for i in range(n)] + [
        "residual",
        "iterations",
    ]
    rows: dict[float, list[str]] = {}
    for s in traj.samples:
        rows[s.k] = (
            [repr(s.k), repr(s.log_rho_over_k)]
            + [repr(c) for c in s.point.coords]
            + [repr(s.residual), str(s.iterations)]
        )
    for f in traj.failures:
        rows[f.k] = [repr(f.k), ""] + [""] * n + [repr(f.residual), str(f.iterations)]
    lines = [",".join(header)]
    for k in sorted(rows):
        lines.append(",".join(rows[k]))
    return "\n".join(lines) + "\n"


def geometric_schedule(k0: float = 4.0, doublings: int = 12) -> list[float]:
    return [k0 * 2.0**i for i in range(doublings + 1)]


def normalized_trajectory(
    A,
    k_schedule: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> PerronTrajectory:
    """Sample P_k = (log Perron vector)/k along the schedule.

    Samples are computed in increasing k, each warm-started from the previous
    solution rescaled to the new k; this continuation is what keeps the
    eigenvector mixture accurate far beyond the range where exp(kA) is
    representable.  A sample that misses the tolerance is recorded as a
    failure rather than aborting the run, but its iterate still seeds the
    next sample.
    """
    M = _as_matrix(A)
    ks = [float(k) for k in k_schedule]
    if not ks:
        raise ValueError("schedule must be non-empty")
    if any(b <= a for a, b in zip(ks, ks[1:])) or ks[0] <= 0:
        raise ValueError("schedule must be positive and strictly increasing")
    samples: list[PerronSample] = []
    failures: list[FailedSample] = []
    y = None
    kprev = None
    for k in ks:
        y0 = None if y is None else y * (k / kprev)
        s, yout, res, it, ok = _solve(k * M, k, tol, max_iter, y0)
        y, kprev = yout, k
        if ok:
            samples.append(
                PerronSample(
                    k=k,
                    log_rho_over_k=s / k,
                    point=float_point(yout / k),
                    residual=res,
                    iterations=it,
                )
            )
        else:
            failures.append(FailedSample(k=k, residual=res, iterations=it))
    return PerronTrajectory(
        samples=tuple(samples),
        matrix_hash=matrix_digest(M),
        failures=tuple(failures),
    )


def _doubling_pairs(samples: Sequence[PerronSample]):
    return [
        (samples[i - 1], samples[i])
        for i in range(1, len(samples))
        if abs(samples[i].k - 2.0 * samples[i - 1].k) <= 1e-9 * samples[i].k
    ]


def estimate_p_infinity(traj: PerronTrajectory) -> PinfEstimate:
    """Richardson extrapolation over a doubling pair of trajectory samples.

    The correction to P_k is O(1/k) while the structure is numerically alive,
    so 2*P_{2k} - P_k cancels the leading term.  Which pair to use is decided
    from the observed decay of successive moves: a move ratio near 1/2 is the
    O(1/k) signature and selects the last such pair; anything faster means
    the sequence has genuinely settled (exponential transients), in which
    case the final pair (effectively the settled value) is the better
    estimate.  error_bound is the sup-norm difference of the chosen pair.
    """
    pairs = _doubling_pairs(traj.samples)
    if not pairs:
        raise EstimateError("need at least two successful samples at k and 2k")
    moves = [
        max(abs(x - y) for x, y in zip(b.point.coords, a.point.coords))
        for a, b in pairs
    ]
    chosen = pairs[-1]
    last_moving = max(
        (i for i, m in enumerate(moves) if m > _MOVE_NOISE), default=None
    )
    if last_moving is not None and last_moving > 0 and moves[last_moving - 1] > _MOVE_NOISE:
        ratio = moves[last_moving] / moves[last_moving - 1]
        if 0.3 <= ratio <= 0.7:
            chosen = pairs[last_moving]
    a, b = chosen
    pa = np.array(a.point.coords)
    pb = np.array(b.point.coords)
    return PinfEstimate(
        point=float_point(2.0 * pb - pa),
        error_bound=float(np.abs(pb - pa).max()),
        k_max_used=b.k,
    )


def first_order_fit(traj: PerronTrajectory) -> tuple[FloatPoint, tuple[float, ...]]:
    """Fit each coordinate of P_k to c_i + d_i / k over the tail half.

    Returns (v, logw) with v = -c, matching the limit convention in which the
    k-th sample behaves like (-v_i + log(w_i)/k) coordinatewise.
    """
    samples = traj.samples
    if len(samples) < 3:
        raise EstimateError("need at least three successful samples for the fit")
    tail = samples[len(samples) // 2:]
    ks = np.array([s.k for s in tail])
    if np.ptp(ks) == 0:
        raise EstimateError("degenerate fit: all k equal")
    X = np.column_stack([np.ones_like(ks), 1.0 / ks])
    Y = np.array([s.point.coords for s in tail])
    coef, *_ = np.linalg.lstsq(X, Y, rcond=None)
    c, d = coef[0], coef[1]
    return float_point(-c), tuple(float(x) for x in d)
