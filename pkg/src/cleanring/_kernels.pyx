# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors ``cleanring._kernels_py`` function by function."""
from array import array

from cpython cimport array as carray
from libc.stdlib cimport malloc, free
from libc.string cimport memcmp, memcpy, memmove

BACKEND = "cython"


cdef long long _inv_mod(long long x, long long p):
    cdef long long r0 = p, r1 = x % p, s0 = 0, s1 = 1, q, t
    while r1:
        q = r0 // r1
        t = r0 - q * r1
        r0 = r1
        r1 = t
        t = s0 - q * s1
        s0 = s1
        s1 = t
    if r0 != 1:
        raise ZeroDivisionError("not invertible mod p")
    s0 %= p
    if s0 < 0:
        s0 += p
    return s0


def rref_modp(rows, long long p):
    """Reduced row echelon form mod p; returns (rows, pivot columns)."""
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t ncols = len(rows[0]) if nrows else 0
    cdef long long *M = <long long *> malloc(max(nrows * ncols, 1) * sizeof(long long))
    cdef Py_ssize_t i, j, c, r = 0, piv
    cdef long long inv, f, x
    pivots = []
    if M == NULL:
        raise MemoryError()
    try:
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                M[i * ncols + j] = row[j] % p
        for c in range(ncols):
            if r == nrows:
                break
            piv = -1
            for i in range(r, nrows):
                if M[i * ncols + c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(ncols):
                    x = M[r * ncols + j]
                    M[r * ncols + j] = M[piv * ncols + j]
                    M[piv * ncols + j] = x
            inv = _inv_mod(M[r * ncols + c], p)
            if inv != 1:
                for j in range(c, ncols):
                    M[r * ncols + j] = M[r * ncols + j] * inv % p
            for i in range(nrows):
                if i != r:
                    f = M[i * ncols + c]
                    if f:
                        for j in range(c, ncols):
                            if M[r * ncols + j]:
                                M[i * ncols + j] = (M[i * ncols + j] - f * M[r * ncols + j]) % p
                                if M[i * ncols + j] < 0:
                                    M[i * ncols + j] += p
            pivots.append(c)
            r += 1
        out = [[M[i * ncols + j] for j in range(ncols)] for i in range(nrows)]
    finally:
        free(M)
    return out, pivots


def decode_matrix(long long x, int n, int p):
    out = []
    for _ in range(n * n):
        out.append(x % p)
        x //= p
    return out


def matmul_table(int n, int p):
    """Multiplication table of M_n(F_p) on base-p encoded matrices (array of int)."""
    cdef int nn = n * n
    cdef long long N = 1
    cdef int k, r, c
    for k in range(nn):
        N *= p
    cdef int *mats = <int *> malloc(N * nn * sizeof(int))
    cdef long long *weights = <long long *> malloc(nn * sizeof(long long))
    cdef carray.array table = carray.clone(array("i"), N * N, zero=False)
    cdef int[:] tv = table
    cdef long long i, j, x, code, s
    cdef int *A
    cdef int *B
    if mats == NULL or weights == NULL:
        free(mats)
        free(weights)
        raise MemoryError()
    try:
        weights[0] = 1
        for k in range(1, nn):
            weights[k] = weights[k - 1] * p
        for i in range(N):
            x = i
            for k in range(nn):
                mats[i * nn + k] = x % p
                x //= p
        for i in range(N):
            A = mats + i * nn
            for j in range(N):
                B = mats + j * nn
                code = 0
                for r in range(n):
                    for c in range(n):
                        s = 0
                        for k in range(n):
                            s += A[r * n + k] * B[k * n + c]
                        code += (s % p) * weights[r * n + c]
                tv[i * N + j] = <int> code
    finally:
        free(mats)
        free(weights)
    return table


def inner_inverses(const int[:] table, int N, int a):
    """All r with a*r*a == a."""
    cdef long long row = <long long> a * N
    cdef int r
    out = []
    for r in range(N):
        if table[<long long> table[row + r] * N + a] == a:
            out.append(r)
    return out


def right_ideal(const int[:] table, int N, int a):
    """Sorted distinct elements a*x."""
    cdef char *seen = <char *> malloc(N)
    cdef long long row = <long long> a * N
    cdef int x
    if seen == NULL:
        raise MemoryError()
    try:
        for x in range(N):
            seen[x] = 0
        for x in range(N):
            seen[table[row + x]] = 1
        out = [x for x in range(N) if seen[x]]
    finally:
        free(seen)
    return out


def idempotents(const int[:] table, int N):
    cdef int e
    return [e for e in range(N) if table[<long long> e * N + e] == e]


def units(const int[:] table, int N, int one):
    """(unit, inverse) pairs."""
    cdef int x, y
    cdef long long row
    out = []
    for x in range(N):
        row = <long long> x * N
        for y in range(N):
            if table[row + y] == one and table[<long long> y * N + x] == one:
                out.append((x, y))
                break
    return out


def monomial_nf(bytes word, tuple lhs, tuple rhs, tuple rank):
    """Normal form of a byte-encoded word under monomial rules.

    Leftmost match first, ties broken by ``rank``; ``rhs[i]`` None sends the
    word to zero.  Returns (word or None, list of applied rule indices).
    """
    cdef Py_ssize_t nrules = len(lhs)
    cdef Py_ssize_t n = len(word)
    cdef Py_ssize_t i, pos, start = 0, best, best_pos, L, R, maxlen = 0
    cdef unsigned char *buf = <unsigned char *> malloc(max(n, 1))
    cdef const unsigned char **lp = <const unsigned char **> malloc(max(nrules, 1) * sizeof(void *))
    cdef const unsigned char **rp = <const unsigned char **> malloc(max(nrules, 1) * sizeof(void *))
    cdef Py_ssize_t *ll = <Py_ssize_t *> malloc(max(nrules, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *rl = <Py_ssize_t *> malloc(max(nrules, 1) * sizeof(Py_ssize_t))
    cdef long *rk = <long *> malloc(max(nrules, 1) * sizeof(long))
    cdef bytes lb, rb
    applied = []
    if buf == NULL or lp == NULL or rp == NULL or ll == NULL or rl == NULL or rk == NULL:
        free(buf); free(lp); free(rp); free(ll); free(rl); free(rk)
        raise MemoryError()
    try:
        memcpy(buf, <const unsigned char *> word, n)
        for i in range(nrules):
            lb = lhs[i]
            lp[i] = <const unsigned char *> lb
            ll[i] = len(lb)
            if ll[i] > maxlen:
                maxlen = ll[i]
            if rhs[i] is None:
                rl[i] = -1
                rp[i] = NULL
            else:
                rb = rhs[i]
                rp[i] = <const unsigned char *> rb
                rl[i] = len(rb)
            rk[i] = rank[i]
        while True:
            best = -1
            best_pos = -1
            for pos in range(start, n):
                for i in range(nrules):
                    L = ll[i]
                    if pos + L <= n and memcmp(buf + pos, lp[i], L) == 0:
                        if best < 0 or rk[i] < rk[best]:
                            best = i
                if best >= 0:
                    best_pos = pos
                    break
            if best < 0:
                return buf[:n], applied
            applied.append(best)
            R = rl[best]
            if R < 0:
                return None, applied
            L = ll[best]
            # right sides are never longer than left sides
            memcpy(buf + best_pos, rp[best], R)
            memmove(buf + best_pos + R, buf + best_pos + L, n - best_pos - L)
            n -= L - R
            start = best_pos - maxlen + 1
            if start < 0:
                start = 0
    finally:
        free(buf); free(lp); free(rp); free(ll); free(rl); free(rk)
