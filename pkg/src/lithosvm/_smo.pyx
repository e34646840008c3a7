# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled SMO loop. Mirrors lithosvm._smo_py.smo_solve exactly: same pair
selection, same bias rule, same convergence test, same status codes. Kept in
lockstep with the numpy fallback; cross-backend results agree to solver
tolerance (not bitwise, since float summation orders differ)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

STATUS_CONVERGED = 0
STATUS_BUDGET_EXCEEDED = 1
STATUS_STALLED = 2

cdef double _clip(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef double _compute_bias(double[::1] alpha, double[::1] ghat, double[::1] d,
                          double C, double eps) nogil:
    cdef Py_ssize_t n = alpha.shape[0]
    cdef Py_ssize_t i
    cdef double c
    cdef double unb_sum = 0.0
    cdef Py_ssize_t unb_count = 0
    cdef double lo_max = 0.0
    cdef double up_min = 0.0
    cdef bint has_lo = False
    cdef bint has_up = False
    for i in range(n):
        c = d[i] - ghat[i]
        if alpha[i] > eps and alpha[i] < C - eps:
            unb_sum += c
            unb_count += 1
        elif alpha[i] <= eps:
            if d[i] > 0:
                if not has_lo or c > lo_max:
                    lo_max = c
                has_lo = True
            else:
                if not has_up or c < up_min:
                    up_min = c
                has_up = True
        else:  # alpha[i] >= C - eps
            if d[i] < 0:
                if not has_lo or c > lo_max:
                    lo_max = c
                has_lo = True
            else:
                if not has_up or c < up_min:
                    up_min = c
                has_up = True
    if unb_count > 0:
        return unb_sum / unb_count
    if has_lo and has_up:
        return (lo_max + up_min) / 2.0
    if has_lo:
        return lo_max
    return up_min


cdef double _kkt_residual(double alpha_i, double u_i, double C, double eps) nogil:
    if alpha_i <= eps:
        return -u_i if u_i < 0.0 else 0.0
    if alpha_i >= C - eps:
        return u_i if u_i > 0.0 else 0.0
    return u_i if u_i >= 0.0 else -u_i


cdef bint _try_update(double[:, ::1] G, double[::1] d, double[::1] alpha,
                      double[::1] ghat, double[::1] E,
                      Py_ssize_t i, Py_ssize_t j, double C, double eps) nogil:
    cdef double di, dj, ai, aj, L, H, eta, grad, t, gain_L, gain_H, gain
    cdef double s, new_ai, delta_i, delta_j, thresh
    cdef Py_ssize_t k
    cdef Py_ssize_t n = alpha.shape[0]
    if i == j:
        return False
    di = d[i]
    dj = d[j]
    ai = alpha[i]
    aj = alpha[j]
    if di != dj:
        L = aj - ai
        if L < 0.0:
            L = 0.0
        H = C + aj - ai
        if H > C:
            H = C
    else:
        L = ai + aj - C
        if L < 0.0:
            L = 0.0
        H = ai + aj
        if H > C:
            H = C
    if L >= H:
        return False
    eta = G[i, i] + G[j, j] - 2.0 * G[i, j]
    grad = dj * (E[i] - E[j])
    if eta > 0.0:
        t = _clip(aj + grad / eta, L, H)
    else:
        gain_L = grad * (L - aj) - 0.5 * eta * (L - aj) * (L - aj)
        gain_H = grad * (H - aj) - 0.5 * eta * (H - aj) * (H - aj)
        t = L if gain_L >= gain_H else H
    if t - L < eps:
        t = L
    elif H - t < eps:
        t = H
    # progress gate: relative for large multipliers, floored at eps so
    # near-zero pairs cannot register float-noise shuffles as progress
    thresh = t + aj + eps
    if thresh < 1.0:
        thresh = 1.0
    if (t - aj if t > aj else aj - t) < eps * thresh:
        return False
    if eta <= 0.0:
        gain = grad * (t - aj) - 0.5 * eta * (t - aj) * (t - aj)
        if gain <= 0.0:
            return False
    s = di * dj
    new_ai = _clip(ai + s * (aj - t), 0.0, C)
    delta_i = (new_ai - ai) * di
    delta_j = (t - aj) * dj
    for k in range(n):
        ghat[k] += delta_i * G[i, k] + delta_j * G[j, k]
    alpha[i] = new_ai
    alpha[j] = t
    return True


def smo_solve(object G_in, object d_in, double C, double kkt_tol,
              long max_passes, double eps):
    """Drop-in replacement for lithosvm._smo_py.smo_solve."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] G_arr = np.ascontiguousarray(G_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] d_arr = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef double[:, ::1] G = G_arr
    cdef double[::1] d = d_arr
    cdef Py_ssize_t n = d.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] alpha_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ghat_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] E_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] viol_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] ghat = ghat_arr
    cdef double[::1] E = E_arr
    cdef double[::1] viol = viol_arr
    cdef long long budget = <long long> max_passes * <long long> n * <long long> n
    cdef long long examinations = 0
    cdef long long iterations = 0
    cdef double bias, max_violation, u, best, cur
    cdef Py_ssize_t i, i1, rank, cand
    cdef bint progressed, stop
    cdef cnp.ndarray order_arr
    cdef long[:] order

    while True:
        bias = _compute_bias(alpha, ghat, d, C, eps)
        max_violation = 0.0
        for i in range(n):
            u = d[i] * (ghat[i] + bias) - 1.0
            viol[i] = _kkt_residual(alpha[i], u, C, eps)
            if viol[i] > max_violation:
                max_violation = viol[i]
        if max_violation <= kkt_tol:
            return alpha_arr, bias, STATUS_CONVERGED, int(iterations), int(examinations), max_violation
        if examinations >= budget:
            return alpha_arr, bias, STATUS_BUDGET_EXCEEDED, int(iterations), int(examinations), max_violation

        for i in range(n):
            E[i] = ghat[i] + bias - d[i]
        progressed = False
        stop = False

        # fast path: worst violator (first index on ties), preferred partner,
        # then ascending rescan; the full violation ordering is only built
        # when the worst violator makes no progress at all
        i1 = 0
        best = viol[0]
        for i in range(1, n):
            if viol[i] > best:
                best = viol[i]
                i1 = i
        progressed, stop = _examine(G, d, alpha, ghat, E, viol, i1, C, eps,
                                    &examinations, budget)
        if not progressed and not stop:
            # remaining candidates in stable descending violation order
            order_arr = np.argsort(-viol_arr, kind="stable").astype(np.int64)
            order = order_arr
            for rank in range(n):
                cand = <Py_ssize_t> order[rank]
                if cand == i1:
                    continue
                if viol[cand] <= kkt_tol:
                    break
                progressed, stop = _examine(G, d, alpha, ghat, E, viol, cand,
                                            C, eps, &examinations, budget)
                if progressed or stop:
                    break
        if progressed:
            iterations += 1
            continue
        if examinations >= budget:
            bias = _compute_bias(alpha, ghat, d, C, eps)
            max_violation = 0.0
            for i in range(n):
                u = d[i] * (ghat[i] + bias) - 1.0
                cur = _kkt_residual(alpha[i], u, C, eps)
                if cur > max_violation:
                    max_violation = cur
            return alpha_arr, bias, STATUS_BUDGET_EXCEEDED, int(iterations), int(examinations), max_violation
        return alpha_arr, bias, STATUS_STALLED, int(iterations), int(examinations), max_violation


cdef (bint, bint) _examine(double[:, ::1] G, double[::1] d, double[::1] alpha,
                           double[::1] ghat, double[::1] E, double[::1] viol,
                           Py_ssize_t i1, double C, double eps,
                           long long* examinations, long long budget):
    """Try the preferred partner for i1, then every other index ascending.

    The preferred partner maximizes |E[i1] - E[j]| over unbounded multipliers
    (their box never blocks the step); when none qualify the same rule runs
    over every point. Returns (progressed, budget_exhausted)."""
    cdef Py_ssize_t n = alpha.shape[0]
    cdef Py_ssize_t j, preferred
    cdef double best, abs_de
    preferred = -1
    best = -1.0
    for j in range(n):
        if j == i1:
            continue
        if alpha[j] <= eps or alpha[j] >= C - eps:
            continue
        abs_de = E[i1] - E[j]
        if abs_de < 0.0:
            abs_de = -abs_de
        if abs_de > best:
            best = abs_de
            preferred = j
    if preferred < 0:
        for j in range(n):
            if j == i1:
                continue
            abs_de = E[i1] - E[j]
            if abs_de < 0.0:
                abs_de = -abs_de
            if abs_de > best:
                best = abs_de
                preferred = j
    if preferred < 0:
        return False, False  # n == 1: no partner exists
    examinations[0] += 1
    if _try_update(G, d, alpha, ghat, E, i1, preferred, C, eps):
        return True, False
    for j in range(n):
        if j == i1 or j == preferred:
            continue
        examinations[0] += 1
        if _try_update(G, d, alpha, ghat, E, i1, j, C, eps):
            return True, False
        if examinations[0] >= budget:
            return False, True
    return False, False
