"""Pure-numpy SMO loop: the fallback backend for the compiled extension.

Both backends implement the same deterministic algorithm:

* working pair: first index is the worst KKT violator (ties resolve to the
  lowest row index); the second maximizes |E1 - E2| over the unbounded
  multipliers (same tie rule) so the pair can always move, falling back to
  the same rule over every point when no multiplier is unbounded, then to an
  ascending-index rescan when the preferred pair makes no progress;
* the bias is recomputed every iteration as the mean complementarity
  residual over unbounded support vectors, falling back to the midpoint of
  the feasible bias interval defined by the bound points;
* convergence means the worst KKT residual, evaluated with that bias, is
  within kkt_tol.

Returns raw state plus a status code; the caller raises on non-convergence.
"""

from __future__ import annotations

import numpy as np

STATUS_CONVERGED = 0
STATUS_BUDGET_EXCEEDED = 1
STATUS_STALLED = 2


def compute_bias(alpha: np.ndarray, ghat: np.ndarray, d: np.ndarray, C: float, eps: float) -> float:
    """Bias making the KKT residuals smallest for the current alpha.

    Unbounded support vectors pin the bias exactly (mean of d_i - ghat_i over
    them); with none present the box conditions only bound it, and the
    midpoint of the tightest interval is used.
    """
    c = d - ghat
    unbounded = (alpha > eps) & (alpha < C - eps)
    if np.any(unbounded):
        return float(c[unbounded].mean())
    at_zero = alpha <= eps
    at_cap = alpha >= C - eps
    lower = (at_zero & (d > 0)) | (at_cap & (d < 0))
    upper = (at_zero & (d < 0)) | (at_cap & (d > 0))
    has_lower = bool(np.any(lower))
    has_upper = bool(np.any(upper))
    if has_lower and has_upper:
        return float((c[lower].max() + c[upper].min()) / 2.0)
    if has_lower:
        return float(c[lower].max())
    return float(c[upper].min())


def kkt_residuals(
    alpha: np.ndarray, ghat: np.ndarray, d: np.ndarray, bias: float, C: float, eps: float
) -> np.ndarray:
    """Per-point violation of the box KKT conditions, all >= 0."""
    u = d * (ghat + bias) - 1.0
    return np.where(
        alpha <= eps,
        np.maximum(0.0, -u),
        np.where(alpha >= C - eps, np.maximum(0.0, u), np.abs(u)),
    )


def smo_solve(
    G: np.ndarray,
    d: np.ndarray,
    C: float,
    kkt_tol: float,
    max_passes: int,
    eps: float,
):
    """Maximize the dual objective over the box with the SMO pair updates.

    Returns (alpha, bias, status, iterations, examinations, max_violation).
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    n = d.shape[0]
    alpha = np.zeros(n)
    ghat = np.zeros(n)
    budget = int(max_passes) * n * n
    examinations = 0
    iterations = 0

    def try_update(i: int, j: int, E: np.ndarray) -> bool:
        nonlocal alpha, ghat
        if i == j:
            return False
        di, dj = d[i], d[j]
        ai, aj = alpha[i], alpha[j]
        if di != dj:
            L = max(0.0, aj - ai)
            H = min(C, C + aj - ai)
        else:
            L = max(0.0, ai + aj - C)
            H = min(C, ai + aj)
        if L >= H:
            return False
        eta = G[i, i] + G[j, j] - 2.0 * G[i, j]
        grad = dj * (E[i] - E[j])  # dW/d(alpha_j) along the constraint line
        if eta > 0.0:
            t = aj + grad / eta
            t = min(max(t, L), H)
        else:
            # degenerate direction: the objective is linear or convex along
            # the segment, so the maximum sits at an endpoint
            gain_L = grad * (L - aj) - 0.5 * eta * (L - aj) ** 2
            gain_H = grad * (H - aj) - 0.5 * eta * (H - aj) ** 2
            t = L if gain_L >= gain_H else H
        if t - L < eps:
            t = L
        elif H - t < eps:
            t = H
        # progress gate: relative for large multipliers, floored at eps so
        # near-zero pairs cannot register float-noise shuffles as progress
        if abs(t - aj) < eps * max(1.0, t + aj + eps):
            return False
        if eta <= 0.0:
            gain = grad * (t - aj) - 0.5 * eta * (t - aj) ** 2
            if gain <= 0.0:
                return False
        s = di * dj
        new_ai = ai + s * (aj - t)
        new_ai = min(max(new_ai, 0.0), C)
        ghat += (new_ai - ai) * di * G[i] + (t - aj) * dj * G[j]
        alpha[i] = new_ai
        alpha[j] = t
        return True

    while True:
        bias = compute_bias(alpha, ghat, d, C, eps)
        violations = kkt_residuals(alpha, ghat, d, bias, C, eps)
        max_violation = float(violations.max())
        if max_violation <= kkt_tol:
            return alpha, bias, STATUS_CONVERGED, iterations, examinations, max_violation
        if examinations >= budget:
            return alpha, bias, STATUS_BUDGET_EXCEEDED, iterations, examinations, max_violation

        E = ghat + bias - d
        unbounded = (alpha > eps) & (alpha < C - eps)
        progressed = False
        # candidates for the first index, worst violation first, then row order
        order = np.argsort(-violations, kind="stable")
        for i1 in order:
            i1 = int(i1)
            if violations[i1] <= kkt_tol:
                break
            # preferred partner: largest |E1 - E2| among unbounded multipliers,
            # whose box never blocks the step; all points when none qualify
            abs_dE = np.abs(E[i1] - E)
            abs_dE[i1] = -1.0
            masked = np.where(unbounded, abs_dE, -1.0)
            preferred = int(np.argmax(masked))
            if masked[preferred] < 0.0:
                preferred = int(np.argmax(abs_dE))
            examinations += 1
            if try_update(i1, preferred, E):
                progressed = True
                break
            stop = False
            for j in range(n):
                if j == i1 or j == preferred:
                    continue
                examinations += 1
                if try_update(i1, j, E):
                    progressed = True
                    break
                if examinations >= budget:
                    stop = True
                    break
            if progressed or stop:
                break
        if progressed:
            iterations += 1
            continue
        if examinations >= budget:
            bias = compute_bias(alpha, ghat, d, C, eps)
            violations = kkt_residuals(alpha, ghat, d, bias, C, eps)
            return alpha, bias, STATUS_BUDGET_EXCEEDED, iterations, examinations, float(violations.max())
        return alpha, bias, STATUS_STALLED, iterations, examinations, max_violation
