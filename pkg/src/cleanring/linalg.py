"""Exact linear algebra over the field objects of :mod:`cleanring.scalars`.

Dense routines take lists of rows.  Prime-field elimination is routed through
the compiled kernel when it is available.  ``solve_sparse`` handles the large,
very sparse systems produced by the free-algebra inverse search.
"""
from __future__ import annotations

from fractions import Fraction

from . import kernels
from .scalars import Field, PrimeField, Rationals

Matrix = list  # list of row lists


def identity(field: Field, n: int) -> Matrix:
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def zeros(field: Field, r: int, c: int) -> Matrix:
    return [[field.zero] * c for _ in range(r)]


def matmul(field: Field, A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [field.zero] * cols
        for k in range(inner):
            x = row[k]
            if field.is_zero(x):
                continue
            bk = B[k]
            for j in range(cols):
                acc[j] = field.add(acc[j], field.mul(x, bk[j]))
        out.append(acc)
    return out


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)] if A else []


def rref(field: Field, A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (input left untouched)."""
    if isinstance(field, PrimeField) and A and A[0]:
        M, pivots = kernels.rref_modp([list(r) for r in A], field.p)
        return M, pivots
    M = [list(r) for r in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if not field.is_zero(M[i][c])), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = field.inv(M[r][c])
        M[r] = [field.mul(inv, x) for x in M[r]]
        for i in range(rows):
            if i != r and not field.is_zero(M[i][c]):
                factor = M[i][c]
                M[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(field: Field, A: Matrix) -> int:
    return len(rref(field, A)[1])


def nullspace(field: Field, A: Matrix) -> list[list]:
    """Basis of {x : A x = 0} (column vectors as lists)."""
    cols = len(A[0]) if A else 0
    M, pivots = rref(field, A)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [field.zero] * cols
        v[fc] = field.one
        for i, pc in enumerate(pivots):
            v[pc] = field.neg(M[i][fc])
        basis.append(v)
    return basis


def left_nullspace(field: Field, A: Matrix) -> list[list]:
    """Basis of {x : x A = 0} (row vectors)."""
    return nullspace(field, transpose(A))


def solve(field: Field, A: Matrix, b: list) -> list | None:
    """One solution of A x = b, or None."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    M, pivots = rref(field, aug)
    if cols in pivots:
        return None
    x = [field.zero] * cols
    for i, pc in enumerate(pivots):
        x[pc] = M[i][cols]
    return x


def inverse(field: Field, A: Matrix) -> Matrix | None:
    n = len(A)
    aug = [list(A[i]) + identity(field, n)[i] for i in range(n)]
    M, pivots = rref(field, aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n or pivots[n - 1] != n - 1:
        return None
    return [row[n:] for row in M[:n]]


def det(field: Field, A: Matrix):
    M = [list(r) for r in A]
    n = len(M)
    d = field.one
    for c in range(n):
        p = next((i for i in range(c, n) if not field.is_zero(M[i][c])), None)
        if p is None:
            return field.zero
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = field.neg(d)
        d = field.mul(d, M[c][c])
        inv = field.inv(M[c][c])
        for i in range(c + 1, n):
            if not field.is_zero(M[i][c]):
                factor = field.mul(M[i][c], inv)
                M[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(M[i], M[c])]
    return d


def rank_factorization(field: Field, A: Matrix) -> tuple[Matrix, Matrix, int]:
    """Invertible P, Q with A = P * D_r * Q, D_r = diag(1,..,1,0,..,0).

    Built column-wise: the first r columns of P are a basis of the column
    space, extended to a basis; Q is chosen so that P^{-1} A = D_r Q.
    """
    n = len(A)
    m = len(A[0]) if n else 0
    _, pivots = rref(field, A)
    r = len(pivots)
    basis = [[A[i][c] for i in range(n)] for c in pivots]
    # extend to a basis of F^n with unit vectors
    cols = list(basis)
    for i in range(n):
        if len(cols) == n:
            break
        e = [field.one if k == i else field.zero for k in range(n)]
        if rank(field, transpose(cols + [e])) > len(cols):
            cols.append(e)
    P = transpose(cols)
    Pinv = inverse(field, P)
    top = matmul(field, Pinv, A)[:r]  # rows r..n of P^{-1}A vanish
    # extend the r independent rows of ``top`` to an invertible m x m Q
    Q = [list(row) for row in top]
    for j in range(m):
        if len(Q) == m:
            break
        e = [field.one if k == j else field.zero for k in range(m)]
        if rank(field, Q + [e]) > len(Q):
            Q.append(e)
    return P, Q, r


def unit_inner_inverse(field: Field, A: Matrix) -> Matrix:
    """Invertible U with A U A = A (square A)."""
    P, Q, r = rank_factorization(field, A)
    return matmul(field, inverse(field, Q), inverse(field, P))


# --- sparse systems ----------------------------------------------------------

MODULUS = 2_147_483_647


def _rational_reconstruct(a: int, m: int) -> Fraction | None:
    bound = int((m // 2) ** 0.5)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)


def _sparse_eliminate(field: Field, columns: list[dict], rhs: dict) -> dict | None:
    """Solve sum_j x_j columns[j] = rhs over ``field``; free unknowns set to 0."""
    rows: dict = {}
    for j, col in enumerate(columns):
        for key, c in col.items():
            rows.setdefault(key, {})[j] = c
    for key in rhs:
        rows.setdefault(key, {})
    pivots: dict[int, tuple[dict, object]] = {}  # var -> (row without pivot var, rhs), pivot coeff 1
    order = sorted(rows, key=lambda k: len(rows[k]))
    for key in order:
        row = dict(rows[key])
        b = rhs.get(key, field.zero)
        # eliminate pivot variables present in this row
        while True:
            hit = next((v for v in row if v in pivots), None)
            if hit is None:
                break
            c = row.pop(hit)
            prow, pb = pivots[hit]
            for v, d in prow.items():
                nv = field.sub(row.get(v, field.zero), field.mul(c, d))
                if field.is_zero(nv):
                    row.pop(v, None)
                else:
                    row[v] = nv
            b = field.sub(b, field.mul(c, pb))
        if not row:
            if not field.is_zero(b):
                return None
            continue
        pv = max(row)
        inv = field.inv(row.pop(pv))
        row = {v: field.mul(inv, d) for v, d in row.items()}
        b = field.mul(inv, b)
        # older pivot rows may still mention pv; back substitution resolves it
        pivots[pv] = (row, b)
    # back substitution, free variables = 0
    solution: dict = {}

    def value(v):
        if v in solution:
            return solution[v]
        if v not in pivots:
            return field.zero
        stack = [v]
        while stack:
            cur = stack[-1]
            if cur in solution:
                stack.pop()
                continue
            prow, pb = pivots[cur]
            missing = [w for w in prow if w in pivots and w not in solution]
            if missing:
                stack.extend(missing)
                continue
            acc = pb
            for w, d in prow.items():
                if w in pivots:
                    acc = field.sub(acc, field.mul(d, solution[w]))
            solution[cur] = acc
            stack.pop()
        return solution[v]

    out = {}
    for v in pivots:
        x = value(v)
        if not field.is_zero(x):
            out[v] = x
    return out



def solve_sparse(field: Field, columns: list[dict], rhs: dict) -> dict | None:
    """Solve sum_j x_j * columns[j] = rhs; returns {j: x_j} (nonzero only) or None.

    Over Q the system is solved modulo a large prime and lifted by rational
    reconstruction; the caller re-verifies exactly.  If lifting fails, the
    exact elimination over Q is used.
    """
    if isinstance(field, Rationals):
        Fp = PrimeField(MODULUS)
        try:
            mcols = [{k: Fp.coerce(c) for k, c in col.items()} for col in columns]
            mrhs = {k: Fp.coerce(c) for k, c in rhs.items()}
            msol = _sparse_eliminate(Fp, mcols, mrhs)
        except ZeroDivisionError:
            msol = None
        if msol is not None:
            lifted = {}
            for j, x in msol.items():
                q = _rational_reconstruct(x, MODULUS)
                if q is None:
                    lifted = None
                    break
                lifted[j] = q
            if lifted is not None and _check(field, columns, rhs, lifted):
                return lifted
        return _sparse_eliminate(field, columns, rhs)
    return _sparse_eliminate(field, columns, rhs)


def _check(field: Field, columns, rhs, sol) -> bool:
    acc: dict = {}
    for j, x in sol.items():
        for k, c in columns[j].items():
            acc[k] = field.add(acc.get(k, field.zero), field.mul(x, c))
    keys = set(acc) | set(rhs)
    return all(field.eq(acc.get(k, field.zero), rhs.get(k, field.zero)) for k in keys)
