"""Integer matrix routines over Z_p at finite precision."""
from __future__ import annotations

from .padic import vp


def elementary_divisors(rows, p, N):
    """Valuations of the elementary divisors of an integer matrix over Z_p.

    Entries are residues modulo p^N. Pivoting on an entry of minimal valuation
    keeps every remaining entry exact modulo p^N. Divisors that vanish at this
    precision are returned as None.
    """
    M = p ** N
    A = [[x % M for x in row] for row in rows]
    nr = len(A)
    nc = len(A[0]) if A else 0
    out = []
    rmax = min(nr, nc)
    for k in range(rmax):
        best = None
        for i in range(k, nr):
            for j in range(k, nc):
                if A[i][j]:
                    v = vp(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            out.extend([None] * (rmax - k))
            break
        v, i, j = best
        A[k], A[i] = A[i], A[k]
        for row in A:
            row[k], row[j] = row[j], row[k]
        piv = A[k][k]
        pv = p ** v
        uinv = pow(piv // pv, -1, M)
        for i in range(k + 1, nr):
            if A[i][k]:
                f = (A[i][k] // pv) * uinv % M
                Ai, Ak = A[i], A[k]
                for j in range(k, nc):
                    Ai[j] = (Ai[j] - f * Ak[j]) % M
        for j in range(k + 1, nc):
            if A[k][j]:
                f = (A[k][j] // pv) * uinv % M
                for i in range(k, nr):
                    A[i][j] = (A[i][j] - f * A[i][k]) % M
        out.append(v)
    return out


def det_exact(rows):
    """Exact determinant of an integer matrix (Bareiss)."""
    A = [list(r) for r in rows]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def solve_mod(rows, rhs, p, N):
    """Solve A y = b over Z_p for square A, returning y mod p^(N - v(det A)).

    Returns (y, lost) where lost is the number of digits of precision given up.
    Raises ZeroDivisionError when A is singular at this precision.
    """
    n = len(rows)
    M = p ** N
    A = [[x % M for x in row] + [b % M] for row, b in zip(rows, rhs)]
    perm_cols = list(range(n))
    lost = 0
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                if A[i][j]:
                    v = vp(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise ZeroDivisionError("singular matrix at working precision")
        v, i, j = best
        A[k], A[i] = A[i], A[k]
        for row in A:
            row[k], row[j] = row[j], row[k]
        perm_cols[k], perm_cols[j] = perm_cols[j], perm_cols[k]
        lost += v
        pv = p ** v
        uinv = pow(A[k][k] // pv, -1, M)
        for i in range(k + 1, n):
            if A[i][k]:
                f = (A[i][k] // pv) * uinv % M
                Ai, Ak = A[i], A[k]
                for j in range(k, n + 1):
                    Ai[j] = (Ai[j] - f * Ak[j]) % M
    # back substitution: each pivot division costs its valuation in precision
    y = [0] * n
    for k in range(n - 1, -1, -1):
        s = A[k][n]
        for j in range(k + 1, n):
            s -= A[k][j] * y[j]
        s %= M
        piv = A[k][k]
        v = vp(piv, p)
        pv = p ** v
        if s % pv:
            # inconsistent at this precision only through lost digits; truncate
            s -= s % pv
        y[k] = (s // pv) * pow(piv // pv, -1, M) % M
    out = [0] * n
    for k in range(n):
        out[perm_cols[k]] = y[k]
    return out, lost
