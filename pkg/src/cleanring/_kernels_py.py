"""Pure-Python implementations of the hot kernels.

Same signatures and results as the compiled ``_kernels`` extension; used when
the extension is not built or when forced through
:func:`cleanring.kernels.use_backend`.
"""

from array import array

BACKEND = "python"


def rref_modp(rows, p):
    """In-place reduced row echelon form mod p; returns (rows, pivot columns)."""
    M = [[x % p for x in r] for r in rows]
    nrows = len(M)
    ncols = len(M[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if M[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        M[r], M[piv] = M[piv], M[r]
        row = M[r]
        inv = pow(row[c], -1, p)
        if inv != 1:
            for j in range(c, ncols):
                row[j] = row[j] * inv % p
        for i in range(nrows):
            if i != r:
                other = M[i]
                f = other[c]
                if f:
                    for j in range(c, ncols):
                        if row[j]:
                            other[j] = (other[j] - f * row[j]) % p
        pivots.append(c)
        r += 1
    return M, pivots


def matmul_table(n, p):
    """Multiplication table of M_n(F_p) on base-p encoded matrices.

    Element code: entries in row-major order, entry k is digit k (least
    significant first).  Returns a flat ``array('i')`` of length N*N,
    N = p**(n*n).
    """
    nn = n * n
    N = p ** nn
    mats = [decode_matrix(x, n, p) for x in range(N)]
    weights = [p ** k for k in range(nn)]
    table = array("i", bytes(4 * N * N))
    for i in range(N):
        A = mats[i]
        base = i * N
        for j in range(N):
            B = mats[j]
            code = 0
            for r in range(n):
                for c in range(n):
                    s = 0
                    for k in range(n):
                        s += A[r * n + k] * B[k * n + c]
                    code += (s % p) * weights[r * n + c]
            table[base + j] = code
    return table


def decode_matrix(x, n, p):
    out = []
    for _ in range(n * n):
        out.append(x % p)
        x //= p
    return out


def inner_inverses(table, N, a):
    """All r with a*r*a == a, given a flat multiplication table."""
    row = a * N
    out = []
    for r in range(N):
        if table[table[row + r] * N + a] == a:
            out.append(r)
    return out


def right_ideal(table, N, a):
    """Sorted distinct elements a*x."""
    row = a * N
    return sorted(set(table[row:row + N]))


def idempotents(table, N):
    return [e for e in range(N) if table[e * N + e] == e]


def units(table, N, one):
    """(unit, inverse) pairs."""
    out = []
    for x in range(N):
        row = x * N
        for y in range(N):
            if table[row + y] == one and table[y * N + x] == one:
                out.append((x, y))
                break
    return out


def monomial_nf(word, lhs, rhs, rank):
    """Normal form of a byte-encoded word under monomial rules.

    ``lhs[i] -> rhs[i]`` (``rhs[i]`` is None for a rule sending the word to
    zero).  The leftmost match is rewritten, ties broken by ``rank``.
    Returns (word or None, list of applied rule indices).
    """
    applied = []
    start = 0
    maxlen = max(len(l) for l in lhs) if lhs else 0
    while True:
        best_pos = -1
        best = -1
        for i, l in enumerate(lhs):
            p = word.find(l, start)
            if p >= 0 and (best_pos < 0 or p < best_pos or (p == best_pos and rank[i] < rank[best])):
                best_pos = p
                best = i
        if best < 0:
            return word, applied
        applied.append(best)
        r = rhs[best]
        if r is None:
            return None, applied
        word = word[:best_pos] + r + word[best_pos + len(lhs[best]):]
        # everything left of the rewrite window is still irreducible
        start = max(0, best_pos - maxlen + 1)
