"""Compiled inner loops.

Everything here is a pure function of its array arguments plus caller-owned
scratch buffers, compiled with ``nogil`` so independent paths can run on
separate threads.  The Python-facing modules wrap these kernels.

A compiled program is the tuple ``(ops, arg1, arg2, consts, value_out, jac_out)``;
instruction ``k`` always writes slot ``k``.
"""

import numpy as np
from numba import njit

OP_CONST = 0
OP_INPUT = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4

REGULAR = 0
MIN_STEP = 1
INFINITY = 2
SINGULAR_END = 3
NUMERICAL = 4

PRED_TANGENT = 0
PRED_RK4 = 1

# indices into the settings vector
S_INITIAL, S_MIN, S_MAX, S_CTOL, S_CITER, S_INC, S_DEC, S_NSUCC, S_DIV, S_ETOL, S_PRED = range(11)

PIVOT_RTOL = 1e-14
REFINE_MAX_ITER = 30

_jit = njit(cache=True, nogil=True)


# -- linear algebra ----------------------------------------------------------


@_jit
def inf_norm(v):
    m = 0.0
    for k in range(v.shape[0]):
        a = abs(v[k])
        if a > m:
            m = a
    return m


@_jit
def lu_factor(A, piv):
    """In-place LU with row pivoting; False if a pivot is negligible."""
    n = A.shape[0]
    for j in range(n):
        colmax = 0.0
        p = j
        for i in range(j, n):
            a = abs(A[i, j])
            if a > colmax:
                colmax = a
                p = i
        piv[j] = p
        if p != j:
            for k in range(n):
                tmp = A[j, k]
                A[j, k] = A[p, k]
                A[p, k] = tmp
        if colmax == 0.0:
            return False
        d = A[j, j]
        for i in range(j + 1, n):
            A[i, j] = A[i, j] / d
        for i in range(j + 1, n):
            lij = A[i, j]
            if lij != 0:
                for k in range(j + 1, n):
                    A[i, k] -= lij * A[j, k]
    return True


@_jit
def lu_factor_checked(A, piv, colscale):
    """LU plus the relative pivot test.

    A pivot is negligible when it falls below PIVOT_RTOL times the largest
    modulus its column had before elimination.
    """
    n = A.shape[0]
    for j in range(n):
        m = 0.0
        for i in range(n):
            a = abs(A[i, j])
            if a > m:
                m = a
        colscale[j] = m
    if not lu_factor(A, piv):
        return False
    for j in range(n):
        if abs(A[j, j]) < PIVOT_RTOL * colscale[j]:
            return False
    return True


@_jit
def lu_substitute(LU, piv, b):
    n = LU.shape[0]
    for j in range(n):
        p = piv[j]
        if p != j:
            tmp = b[j]
            b[j] = b[p]
            b[p] = tmp
    for i in range(n):
        s = b[i]
        for k in range(i):
            s -= LU[i, k] * b[k]
        b[i] = s
    for i in range(n - 1, -1, -1):
        s = b[i]
        for k in range(i + 1, n):
            s -= LU[i, k] * b[k]
        b[i] = s / LU[i, i]


@_jit
def solve_into(A, b, work, piv, colscale):
    """Solve A y = b, overwriting b with y. A is left untouched."""
    work[:, :] = A
    if not lu_factor_checked(work, piv, colscale):
        return False
    lu_substitute(work, piv, b)
    for k in range(b.shape[0]):
        if not np.isfinite(b[k].real) or not np.isfinite(b[k].imag):
            return False
    return True


# -- straight-line programs --------------------------------------------------


@_jit
def run_program(ops, arg1, arg2, consts, x, slots):
    for k in range(ops.shape[0]):
        op = ops[k]
        if op == OP_MUL:
            slots[k] = slots[arg1[k]] * slots[arg2[k]]
        elif op == OP_ADD:
            slots[k] = slots[arg1[k]] + slots[arg2[k]]
        elif op == OP_SUB:
            slots[k] = slots[arg1[k]] - slots[arg2[k]]
        elif op == OP_CONST:
            slots[k] = consts[arg1[k]]
        else:
            slots[k] = x[arg1[k]]


@_jit
def eval_program(prog, x, slots, F, J):
    """Fill values F and Jacobian J; False on a non-finite output."""
    ops, arg1, arg2, consts, vout, jout = prog
    run_program(ops, arg1, arg2, consts, x, slots)
    ok = True
    n = vout.shape[0]
    for i in range(n):
        v = slots[vout[i]]
        F[i] = v
        if not (np.isfinite(v.real) and np.isfinite(v.imag)):
            ok = False
        for j in range(jout.shape[1]):
            w = slots[jout[i, j]]
            J[i, j] = w
            if not (np.isfinite(w.real) and np.isfinite(w.imag)):
                ok = False
    return ok


@_jit
def magnitude_scale(aprog, x, slots, xabs):
    """max(1, max_i sum_m |c_im| |x|^m) via a program with absolute coefficients."""
    for i in range(x.shape[0]):
        xabs[i] = abs(x[i])
    ops, arg1, arg2, consts, vout, jout = aprog
    run_program(ops, arg1, arg2, consts, xabs, slots)
    m = 1.0
    for i in range(vout.shape[0]):
        v = slots[vout[i]].real
        if not np.isfinite(v):
            return np.inf
        if v > m:
            m = v
    return m


# -- homotopy ----------------------------------------------------------------


def make_workspace(n, gsize, fsize, asize):
    c = np.complex128
    return (
        np.empty(max(gsize, 1), c),  # 0 start slots
        np.empty(max(fsize, 1), c),  # 1 target slots
        np.empty(n, c),  # 2 g values
        np.empty((n, n), c),  # 3 g jacobian
        np.empty(n, c),  # 4 f values
        np.empty((n, n), c),  # 5 f jacobian
        np.empty(n, c),  # 6 H
        np.empty((n, n), c),  # 7 Hx
        np.empty(n, c),  # 8 Ht
        np.empty((n, n), c),  # 9 LU work
        np.empty(n, np.int64),  # 10 pivots
        np.empty(n, np.float64),  # 11 column scales
        np.empty((6, n), c),  # 12 vector scratch
        np.empty(max(asize, 1), c),  # 13 magnitude-program slots
    )


@_jit
def eval_homotopy(hom, x, t, ws):
    """H = (1-t) g + gamma t f, its x-Jacobian, and dH/dt = gamma f - g."""
    gprog, fprog, gamma, aprog = hom
    gslots, fslots, gF, gJ, fF, fJ, H, Hx, Ht = ws[0], ws[1], ws[2], ws[3], ws[4], ws[5], ws[6], ws[7], ws[8]
    ok1 = eval_program(gprog, x, gslots, gF, gJ)
    ok2 = eval_program(fprog, x, fslots, fF, fJ)
    a = 1.0 - t
    b = gamma * t
    n = x.shape[0]
    for i in range(n):
        H[i] = a * gF[i] + b * fF[i]
        Ht[i] = gamma * fF[i] - gF[i]
        for j in range(n):
            Hx[i, j] = a * gJ[i, j] + b * fJ[i, j]
    return ok1 and ok2


@_jit
def davidenko(hom, x, t, ws, out):
    """dx/dt = -Hx^{-1} Ht written into out. Returns (evaluated, solved)."""
    if not eval_homotopy(hom, x, t, ws):
        return False, False
    Hx, Ht = ws[7], ws[8]
    n = x.shape[0]
    for i in range(n):
        out[i] = -Ht[i]
    return True, solve_into(Hx, out, ws[9], ws[10], ws[11])


@_jit
def predict(hom, x, t, dt, method, ws, out):
    """One predictor step from (x, t) to t + dt. Returns (evaluated, solved)."""
    scratch = ws[12]
    k1 = scratch[0]
    n = x.shape[0]
    ev, ok = davidenko(hom, x, t, ws, k1)
    if not (ev and ok):
        return ev, ok
    if method == PRED_TANGENT:
        for i in range(n):
            out[i] = x[i] + dt * k1[i]
        return True, True
    k2, k3, k4, y = scratch[1], scratch[2], scratch[3], scratch[4]
    half = 0.5 * dt
    for i in range(n):
        y[i] = x[i] + half * k1[i]
    ev, ok = davidenko(hom, y, t + half, ws, k2)
    if not (ev and ok):
        return ev, ok
    for i in range(n):
        y[i] = x[i] + half * k2[i]
    ev, ok = davidenko(hom, y, t + half, ws, k3)
    if not (ev and ok):
        return ev, ok
    for i in range(n):
        y[i] = x[i] + dt * k3[i]
    ev, ok = davidenko(hom, y, t + dt, ws, k4)
    if not (ev and ok):
        return ev, ok
    sixth = dt / 6.0
    for i in range(n):
        out[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return True, True


@_jit
def correct(hom, x, t, tol, maxit, ws, out):
    """Newton on H(., t) starting from x. Returns (converged, iterations, last update norm)."""
    dx = ws[12][5]
    n = x.shape[0]
    for i in range(n):
        out[i] = x[i]
    step = np.inf
    for it in range(1, maxit + 1):
        if not eval_homotopy(hom, out, t, ws):
            return False, it, step
        for i in range(n):
            dx[i] = ws[6][i]
        if not solve_into(ws[7], dx, ws[9], ws[10], ws[11]):
            return False, it, step
        for i in range(n):
            out[i] = out[i] - dx[i]
        step = inf_norm(dx)
        if step <= tol * max(1.0, inf_norm(out)):
            return True, it, step
    return False, maxit, step


@_jit
def refine_target(fprog, x, tol, maxit, slots, F, J, work, piv, colscale, dx, out):
    """Newton on the target system alone. Returns (converged, iterations, residual)."""
    n = x.shape[0]
    for i in range(n):
        out[i] = x[i]
    converged = False
    it = 0
    while it < maxit:
        it += 1
        if not eval_program(fprog, out, slots, F, J):
            break
        for i in range(n):
            dx[i] = F[i]
        if not solve_into(J, dx, work, piv, colscale):
            break
        for i in range(n):
            out[i] = out[i] - dx[i]
        if inf_norm(dx) <= tol * max(1.0, inf_norm(out)):
            converged = True
            break
    if eval_program(fprog, out, slots, F, J):
        residual = inf_norm(F)
    else:
        residual = np.inf
    return converged, it, residual


@_jit
def track_path(hom, x0, settings, ws, record, history):
    """Follow one path from t=0 to t=1.

    Returns (end point, status code, t_fail, steps, newton iterations, residual).
    When ``record`` is set, each attempted (t, dt) pair is appended to history.
    """
    initial = settings[S_INITIAL]
    min_step = settings[S_MIN]
    max_step = settings[S_MAX]
    ctol = settings[S_CTOL]
    citer = np.int64(settings[S_CITER])
    inc = settings[S_INC]
    dec = settings[S_DEC]
    nsucc = np.int64(settings[S_NSUCC])
    div = settings[S_DIV]
    etol = settings[S_ETOL]
    method = np.int64(settings[S_PRED])

    n = x0.shape[0]
    x = x0.copy()
    xp = np.empty(n, np.complex128)
    xc = np.empty(n, np.complex128)
    steps = 0
    newton = 0

    if not eval_homotopy(hom, x, 0.0, ws) or inf_norm(ws[6]) > ctol:
        return x, NUMERICAL, 0.0, 0, 0, np.inf

    t = 0.0
    dt = initial
    successes = 0
    while t < 1.0:
        if dt < min_step:
            return x, MIN_STEP, t, steps, newton, np.inf
        last = dt >= 1.0 - t
        h = 1.0 - t if last else dt
        if record:
            history.append(t)
            history.append(dt)
        steps += 1
        ev, ok = predict(hom, x, t, h, method, ws, xp)
        if not ev and not eval_homotopy(hom, x, t, ws):
            return x, INFINITY, t, steps, newton, np.inf
        converged = False
        if ok:
            t_next = 1.0 if last else t + h
            converged, its, _ = correct(hom, xp, t_next, ctol, citer, ws, xc)
            newton += its
        if converged:
            t = 1.0 if last else t + h
            for i in range(n):
                x[i] = xc[i]
            if inf_norm(x) > div:
                return x, INFINITY, t, steps, newton, np.inf
            successes += 1
            if successes >= nsucc:
                dt = min(dt * inc, max_step)
                successes = 0
        else:
            successes = 0
            dt *= dec

    gprog, fprog, gamma, aprog = hom
    converged, its, residual = refine_target(
        fprog, x, etol, REFINE_MAX_ITER, ws[1], ws[4], ws[5], ws[9], ws[10], ws[11], ws[12][5], xc
    )
    newton += its
    if np.isfinite(residual):
        for i in range(n):
            x[i] = xc[i]
    if converged and residual <= etol * magnitude_scale(aprog, x, ws[13], ws[12][4]):
        return x, REGULAR, 1.0, steps, newton, residual
    return x, SINGULAR_END, 1.0, steps, newton, residual
