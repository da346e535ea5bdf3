"""Independent reference computations used by the tests.

None of these call into the package's numerical code; each solves the same
problem by a different (usually brute-force) route.
"""

import itertools

import numpy as np


def sse_best_two_partition(points):
    """Exhaustive minimizer of within-cluster SSE over all 2-partitions.

    Returns the partition as a frozenset of two frozensets of indices.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 1:
        P = P.T
    k = P.shape[0]
    best, best_sse = None, np.inf
    # fix index 0 in the first block so each partition is visited once
    for mask in range(1 << (k - 1)):
        a = [0] + [i + 1 for i in range(k - 1) if mask >> i & 1]
        b = [i for i in range(k) if i not in a]
        if not b:
            continue
        sse = sum(float(np.sum((P[g] - P[g].mean(axis=0)) ** 2)) for g in (a, b))
        if sse < best_sse - 1e-12:
            best, best_sse = frozenset([frozenset(a), frozenset(b)]), sse
    return best


def cofactor_det(A):
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 1:
        return A[0, 0]
    if n == 2:
        return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    return sum((-1) ** j * A[0, j] * cofactor_det(np.delete(np.delete(A, 0, 0), j, 1))
               for j in range(n))


def adjugate_inverse(A):
    """Inverse by the adjugate formula, for k <= 5."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    C = np.empty_like(A)
    for i in range(n):
        for j in range(n):
            C[i, j] = (-1) ** (i + j) * cofactor_det(np.delete(np.delete(A, i, 0), j, 1))
    return C.T / cofactor_det(A)


def charpoly_largest_root(A):
    """Largest real eigenvalue from the characteristic polynomial (Faddeev-LeVerrier)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    coeffs = [1.0]
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ M) / k)
    roots = np.roots(coeffs)
    return float(np.max(roots.real))


def brute_box_qp(Q, c, lower, upper, grid=None):
    """Objective of a box QP by enumerating faces; free coordinates solved exactly.

    Same idea as an active-set enumeration but written independently with
    pseudo-inverse solves, for cross-checking the package's oracle.
    """
    Q = np.asarray(Q, float)
    c = np.asarray(c, float)
    k = len(c)
    best = np.inf
    for states in itertools.product((0, 1, 2), repeat=k):
        x = np.zeros(k)
        ok = True
        for i, s in enumerate(states):
            if s == 1:
                if not np.isfinite(lower[i]):
                    ok = False
                    break
                x[i] = lower[i]
            elif s == 2:
                if not np.isfinite(upper[i]):
                    ok = False
                    break
                x[i] = upper[i]
        if not ok:
            continue
        free = [i for i, s in enumerate(states) if s == 0]
        fixed = [i for i, s in enumerate(states) if s != 0]
        if free:
            rhs = -(c[free] + Q[np.ix_(free, fixed)] @ x[fixed])
            x[free] = np.linalg.pinv(Q[np.ix_(free, free)]) @ rhs
            if np.linalg.norm(Q[np.ix_(free, free)] @ x[free] - rhs) > 1e-8 * (1 + np.linalg.norm(rhs)):
                continue
        if np.all(x >= np.asarray(lower) - 1e-10) and np.all(x <= np.asarray(upper) + 1e-10):
            best = min(best, 0.5 * x @ Q @ x + c @ x)
    return best


def perceptron_separates(X, y, max_epochs=10000):
    """Run the perceptron to convergence; True if it finds a zero-error separator."""
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    w = np.zeros(Xa.shape[1])
    for _ in range(max_epochs):
        errors = 0
        for xi, yi in zip(Xa, y):
            if yi * (xi @ w) <= 0:
                w += yi * xi
                errors += 1
        if errors == 0:
            return True
    return False


def gbtsvm_primal(C_own, C_other, R_other, d, delta, sign):
    """Plane hugging ``C_own`` with ``C_other`` pushed to the ``sign`` side.

    min 0.5 ||[C_own e] u||^2 + 0.5 delta ||u||^2 + d sum(xi)
    s.t. sign * [C_other e] u + xi >= 1 + R_other, xi >= 0

    ``sign = -1`` gives the +1-class plane, ``+1`` the -1-class plane.
    """
    import cvxpy as cp

    H = np.hstack([C_own, np.ones((C_own.shape[0], 1))])
    G = np.hstack([C_other, np.ones((C_other.shape[0], 1))])
    u = cp.Variable(H.shape[1])
    xi = cp.Variable(G.shape[0])
    obj = 0.5 * cp.sum_squares(H @ u) + 0.5 * delta * cp.sum_squares(u) + d * cp.sum(xi)
    cons = [sign * (G @ u) + xi >= 1 + R_other, xi >= 0]
    cp.Problem(cp.Minimize(obj), cons).solve(solver=cp.CLARABEL)
    return u.value


def ls_primal(C_own, C_other, R_other, d_box, d_reg, sign):
    """Regularized least-squares twin plane.

    min 0.5 ||C_own w + b||^2 + 0.5 d_reg (||w||^2 + b^2) + d_box sum(xi)
    s.t. sign * (C_other w + b) + xi >= 1 + R_other, xi >= 0
    """
    import cvxpy as cp

    m = C_own.shape[1]
    w = cp.Variable(m)
    b = cp.Variable()
    xi = cp.Variable(C_other.shape[0])
    obj = (0.5 * cp.sum_squares(C_own @ w + b) + 0.5 * d_reg * (cp.sum_squares(w) + b ** 2)
           + d_box * cp.sum(xi))
    cons = [sign * (C_other @ w + b) + xi >= 1 + R_other, xi >= 0]
    cp.Problem(cp.Minimize(obj), cons).solve(solver=cp.CLARABEL)
    return w.value, float(b.value)
