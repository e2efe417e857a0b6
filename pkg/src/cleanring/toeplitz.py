"""Structured infinite matrices: Laurent-polynomial symbol plus finite deviation.

Two models share the representation ``entry(i, j) = symbol[j - i] + dev(i, j)``:

* ``bilateral``: rows and columns indexed by all integers;
* ``unilateral``: rows and columns indexed by 1, 2, 3, ...; products pick up
  a finite truncation correction because the sum over the middle index stops
  at 1.

``psi`` returns the symbol, a ring homomorphism onto the Laurent polynomials.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from . import linalg
from .freealg import ResourceError
from .scalars import Field, LaurentPolynomial, PrimeField, parse_field, parse_laurent

BILATERAL = "bilateral"
UNILATERAL = "unilateral"

# largest window (number of indices) accepted by the idempotent enumeration
WINDOW_CAP = {2: 6, 3: 4}


class ToeplitzElement:
    """Immutable element; compare structurally (canonical form is unique)."""

    __slots__ = ("ring", "symbol", "dev", "_hash")

    def __init__(self, ring: ToeplitzRing, symbol: LaurentPolynomial, dev: dict):
        self.ring = ring
        self.symbol = symbol
        self.dev = dev
        self._hash = None

    def entry(self, i: int, j: int):
        if self.ring.model == UNILATERAL and (i < 1 or j < 1):
            raise IndexError(f"unilateral indices start at 1, got ({i},{j})")
        f = self.ring.field
        return f.add(self.symbol.coeff(j - i), self.dev.get((i, j), f.zero))

    def __add__(self, other):
        return self.ring.add(self, other)

    def __sub__(self, other):
        return self.ring.sub(self, other)

    def __neg__(self):
        return self.ring.neg(self)

    def __mul__(self, other):
        return self.ring.mul(self, other)

    def __pow__(self, n: int):
        return self.ring.pow(self, n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ToeplitzElement):
            return NotImplemented
        return self.ring.eq(self, other)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.symbol, frozenset(self.dev.items())))
        return self._hash

    def __repr__(self) -> str:
        return self.ring.fmt(self)


class BilateralElement(ToeplitzElement):
    __slots__ = ()


class UnilateralElement(ToeplitzElement):
    __slots__ = ()


class ToeplitzRing:
    """Ring handle for one model over one field."""

    def __init__(self, model: str = BILATERAL, field: Field | str = "F2"):
        if model not in (BILATERAL, UNILATERAL):
            raise ValueError(f"unknown model {model!r}")
        self.model = model
        self.field = parse_field(field) if isinstance(field, str) else field
        self.name = f"{model}({self.field.name})"
        self._cls = BilateralElement if model == BILATERAL else UnilateralElement
        self.zero = self.element(LaurentPolynomial(self.field), {})
        self.one = self.element(LaurentPolynomial.constant(self.field, 1), {})
        self.is_finite = False

    def __eq__(self, other) -> bool:
        return isinstance(other, ToeplitzRing) and (self.model, self.field) == (other.model, other.field)

    def __hash__(self) -> int:
        return hash((self.model, self.field))

    def __repr__(self) -> str:
        return self.name

    # construction --------------------------------------------------------

    def element(self, symbol: LaurentPolynomial | dict | str | None = None,
                deviation: dict | None = None) -> ToeplitzElement:
        f = self.field
        if symbol is None:
            symbol = LaurentPolynomial(f)
        elif isinstance(symbol, str):
            symbol = parse_laurent(symbol, f)
        elif isinstance(symbol, dict):
            symbol = LaurentPolynomial(f, {k: f.coerce(c) for k, c in symbol.items()})
        dev = {}
        for (i, j), c in (deviation or {}).items():
            if self.model == UNILATERAL and (i < 1 or j < 1):
                raise IndexError(f"unilateral deviation index ({i},{j}) out of range; indices start at 1")
            c = f.coerce(c)
            if (i, j) in dev:
                c = f.add(dev[(i, j)], c)
            dev[(int(i), int(j))] = c
        return self._make(symbol, dev)

    def _make(self, symbol: LaurentPolynomial, dev: dict) -> ToeplitzElement:
        f = self.field
        return self._cls(self, symbol, {k: c for k, c in dev.items() if not f.is_zero(c)})

    def from_entries(self, symbol, entries: dict) -> ToeplitzElement:
        """Element whose listed entries are given outright (the deviation is
        whatever differs from the symbol diagonal)."""
        e = self.element(symbol)
        f = self.field
        dev = {(i, j): f.sub(f.coerce(c), e.symbol.coeff(j - i)) for (i, j), c in entries.items()}
        return self.element(e.symbol, dev)

    def scalar(self, c) -> ToeplitzElement:
        return self.element(LaurentPolynomial.constant(self.field, c))

    def toeplitz(self, symbol) -> ToeplitzElement:
        return self.element(symbol)

    def matrix_unit(self, i: int, j: int, c=1) -> ToeplitzElement:
        return self.element(None, {(i, j): c})

    def shift_down(self) -> ToeplitzElement:
        """Entries 1 where row - column = 1 (symbol t^-1)."""
        return self.element({-1: 1})

    def shift_up(self) -> ToeplitzElement:
        """Entries 1 where column - row = 1 (symbol t)."""
        return self.element({1: 1})

    # arithmetic ----------------------------------------------------------

    def _check(self, A, B=None):
        for X in (A, B):
            if X is not None and X.ring != self:
                raise ValueError(f"model mismatch: {X.ring.name} vs {self.name}")

    def add(self, A, B):
        self._check(A, B)
        f = self.field
        dev = dict(A.dev)
        for k, c in B.dev.items():
            dev[k] = f.add(dev[k], c) if k in dev else c
        return self._make(A.symbol + B.symbol, dev)

    def neg(self, A):
        self._check(A)
        f = self.field
        return self._make(-A.symbol, {k: f.neg(c) for k, c in A.dev.items()})

    def sub(self, A, B):
        return self.add(A, self.neg(B))

    def mul(self, A, B):
        self._check(A, B)
        f = self.field
        fs, gs = A.symbol.coeffs, B.symbol.coeffs
        X, Y = A.dev, B.dev
        uni = self.model == UNILATERAL
        dev: dict = {}

        def acc(key, c):
            if key in dev:
                dev[key] = f.add(dev[key], c)
            else:
                dev[key] = c

        # D(f) * Y: entry (i, j) gets f[k - i] * Y[k, j]
        for (k, j), y in Y.items():
            for d, c in fs.items():
                i = k - d
                if not uni or i >= 1:
                    acc((i, j), f.mul(c, y))
        # X * D(g): entry (i, j) gets X[i, k] * g[j - k]
        for (i, k), x in X.items():
            for d, c in gs.items():
                j = k + d
                if not uni or j >= 1:
                    acc((i, j), f.mul(x, c))
        # X * Y
        if X and Y:
            rows: dict = {}
            for (k, j), y in Y.items():
                rows.setdefault(k, []).append((j, y))
            for (i, k), x in X.items():
                for j, y in rows.get(k, ()):
                    acc((i, j), f.mul(x, y))
        # quarter-plane truncation: remove middle indices k <= 0
        if uni:
            for d1, c1 in fs.items():
                for i in range(1, -d1 + 1):
                    k = i + d1
                    for d2, c2 in gs.items():
                        j = k + d2
                        if j >= 1:
                            acc((i, j), f.neg(f.mul(c1, c2)))
        return self._make(A.symbol * B.symbol, dev)

    def pow(self, A, n: int):
        if n < 0:
            raise ValueError("negative powers are not available")
        out, base = self.one, A
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def eq(self, A, B) -> bool:
        return A.symbol == B.symbol and A.dev == B.dev

    def is_zero(self, A) -> bool:
        return A.symbol.is_zero() and not A.dev

    def inverse(self, A):
        from .scalars import UnsupportedOperation
        raise UnsupportedOperation("no general unit test in this ring; use zero_line_certificate")

    # sampling / text -----------------------------------------------------

    def random_element(self, rng: random.Random, spread: int = 2, dev_terms: int = 3,
                       box: int = 3) -> ToeplitzElement:
        f = self.field
        sym = {k: f.random_element(rng) for k in range(-spread, spread + 1) if rng.random() < 0.5}
        lo, hi = (1, 2 * box) if self.model == UNILATERAL else (-box, box)
        dev = {(rng.randint(lo, hi), rng.randint(lo, hi)): f.random_element(rng) for _ in range(dev_terms)}
        return self.element(LaurentPolynomial(f, sym), dev)

    def fmt(self, A) -> str:
        f = self.field
        dev = ",".join(f"({i},{j})={f.fmt(c)}" for (i, j), c in sorted(A.dev.items()))
        return f"symbol={A.symbol.fmt()}; dev={dev}"

    def to_json(self, A) -> dict:
        f = self.field
        return {"model": self.model, "field": f.name, "symbol": A.symbol.fmt(),
                "deviation": [[i, j, f.to_json(c)] for (i, j), c in sorted(A.dev.items())]}

    def parse(self, text: str) -> ToeplitzElement:
        return parse_element(text, self)


_DEV_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*=\s*([^,]+)")


def parse_element(text: str, ring: ToeplitzRing) -> ToeplitzElement:
    """``symbol=<laurent>; dev=(i,j)=c,(i,j)=c`` (either part may be omitted)."""
    symbol = None
    dev: dict = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, value = part.partition("=")
        key = key.strip()
        if key == "symbol":
            symbol = parse_laurent(value, ring.field)
        elif key == "dev":
            value = value.strip()
            pos = 0
            while pos < len(value):
                m = _DEV_RE.match(value, pos)
                if not m:
                    raise ValueError(f"bad deviation entry near {value[pos:]!r}")
                i, j, c = int(m.group(1)), int(m.group(2)), ring.field.parse(m.group(3).strip())
                dev[(i, j)] = ring.field.add(dev.get((i, j), ring.field.zero), c)
                pos = m.end()
                while pos < len(value) and value[pos] in ", ":
                    pos += 1
        else:
            raise ValueError(f"unknown element part {key!r}; expected symbol= or dev=")
    return ring.element(symbol, dev)


# --- functional interface --------------------------------------------------------

def elem_build(symbol, deviation: dict | None = None, model: str = BILATERAL,
               field: Field | str = "F2") -> ToeplitzElement:
    return ToeplitzRing(model, field).element(symbol, deviation)


def elem_arith(A: ToeplitzElement, B: ToeplitzElement, op: str):
    R = A.ring
    if B.ring != R:
        raise ValueError(f"model mismatch: {A.ring.name} vs {B.ring.name}")
    if op == "add":
        return R.add(A, B)
    if op == "mul":
        return R.mul(A, B)
    if op == "eq":
        return R.eq(A, B)
    raise ValueError(f"unknown operation {op!r}")


def psi(A: ToeplitzElement) -> LaurentPolynomial:
    return A.symbol


def window(A: ToeplitzElement, rows: tuple[int, int], cols: tuple[int, int]) -> list[list]:
    """Dense block of entries, rows and columns given as inclusive (lo, hi)."""
    return [[A.entry(i, j) for j in range(cols[0], cols[1] + 1)] for i in range(rows[0], rows[1] + 1)]


def dense_product_window(A: ToeplitzElement, B: ToeplitzElement, rows: tuple[int, int],
                         cols: tuple[int, int]) -> list[list]:
    """Window of AB computed from dense windows of A and B over a middle range
    wide enough to contain every contributing index."""
    f = A.ring.field
    mids = set()
    for i in range(rows[0], rows[1] + 1):
        mids.update(i + d for d in A.symbol.coeffs)
    mids.update(k for (_, k) in A.dev)
    for j in range(cols[0], cols[1] + 1):
        mids.update(j - d for d in B.symbol.coeffs)
    mids.update(k for (k, _) in B.dev)
    if A.ring.model == UNILATERAL:
        mids = {k for k in mids if k >= 1}
    mids = sorted(mids)
    out = []
    for i in range(rows[0], rows[1] + 1):
        row = []
        for j in range(cols[0], cols[1] + 1):
            s = f.zero
            for k in mids:
                a = A.entry(i, k)
                if not f.is_zero(a):
                    s = f.add(s, f.mul(a, B.entry(k, j)))
            row.append(s)
        out.append(row)
    return out


def zero_line_certificate(A: ToeplitzElement, which: str, index: int) -> bool:
    """True iff row ``index`` (which='row') or column ``index`` (which='column')
    of A is identically zero; such an element is never a unit."""
    f = A.ring.field
    uni = A.ring.model == UNILATERAL
    if uni and index < 1:
        raise IndexError("unilateral indices start at 1")
    if which == "row":
        cand = {index + d for d in A.symbol.coeffs} | {j for (i, j) in A.dev if i == index}
        cells = [(index, j) for j in cand if not uni or j >= 1]
    elif which == "column":
        cand = {index - d for d in A.symbol.coeffs} | {i for (i, j) in A.dev if j == index}
        cells = [(i, index) for i in cand if not uni or i >= 1]
    else:
        raise ValueError("which must be 'row' or 'column'")
    return all(f.is_zero(A.entry(i, j)) for i, j in cells)


def window_indices(model: str, radius: int) -> list[int]:
    """Indices of the enumeration window: [-r, r) bilateral, [1, 2r] unilateral."""
    return list(range(-radius, radius)) if model == BILATERAL else list(range(1, 2 * radius + 1))


def idempotent_matrices(field: PrimeField, n: int) -> Iterator[list[list[int]]]:
    """All idempotent n x n matrices over F_q.

    E = B C with the columns of B a basis of the image (B^T in reduced row
    echelon form) and C any k x n matrix with C B = I_k.
    """
    q = field.p
    yield [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        for pivots in itertools.combinations(range(n), k):
            free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, n) if c not in pivots]
            nonpiv = [c for c in range(n) if c not in pivots]
            for vals in itertools.product(range(q), repeat=len(free)):
                Bt = [[0] * n for _ in range(k)]
                for r, pc in enumerate(pivots):
                    Bt[r][pc] = 1
                for (r, c), v in zip(free, vals):
                    Bt[r][c] = v
                # annihilator basis: z with z B = 0, one per non-pivot column
                ann = []
                for c in nonpiv:
                    z = [0] * n
                    z[c] = 1
                    for r, pc in enumerate(pivots):
                        z[pc] = (z[pc] - Bt[r][c]) % q
                    ann.append(z)
                for coeffs in itertools.product(range(q), repeat=k * (n - k)):
                    C = [[1 if c == pivots[r] else 0 for c in range(n)] for r in range(k)]
                    for r in range(k):
                        for s, z in enumerate(ann):
                            m = coeffs[r * (n - k) + s]
                            if m:
                                row = C[r]
                                for c in range(n):
                                    if z[c]:
                                        row[c] = (row[c] + m * z[c]) % q
                    E = [[sum(Bt[r][i] * C[r][j] for r in range(k)) % q for j in range(n)] for i in range(n)]
                    yield E


def enumerate_window_idempotents(ring: ToeplitzRing, radius: int,
                                 symbol_choices: Sequence[int] = (0, 1)) -> Iterator[ToeplitzElement]:
    """Every E with E^2 = E, symbol in ``symbol_choices`` and deviation inside the
    window (see :func:`window_indices`).  Symbol 1 elements are 1 - E' with E'
    a windowed idempotent of symbol 0."""
    f = ring.field
    if not isinstance(f, PrimeField) or f.p not in WINDOW_CAP:
        raise ValueError("window enumeration supports F2 and F3")
    if any(s not in (0, 1) for s in symbol_choices):
        raise ValueError("idempotent symbols are 0 or 1")
    idx = window_indices(ring.model, radius)
    if len(idx) > WINDOW_CAP[f.p]:
        raise ResourceError(f"window of {len(idx)} indices exceeds the cap {WINDOW_CAP[f.p]} for {f.name}",
                            len(idx))
    for s in symbol_choices:
        for E in idempotent_matrices(f, len(idx)):
            dev = {(idx[i], idx[j]): E[i][j] for i in range(len(idx)) for j in range(len(idx)) if E[i][j]}
            el = ring.element(None, dev)
            yield el if s == 0 else ring.sub(ring.one, el)


# --- corner factorization and unit inner inverses ---------------------------------

@dataclass
class CornerFactorization:
    """Finite-rank corner data of a zero-symbol element.

    Rows ``row_range`` x columns ``col_range`` (inclusive) carry the corner
    [[Y X0, Y X0 Z], [X0, X0 Z]]: X0 is c x d (its rows are the last c rows,
    its columns the first d columns), Y has c columns and Z has d rows.
    """
    X0: list[list]
    Y: list[list]
    Z: list[list]
    c: int
    d: int
    m: int
    n: int
    row_range: tuple[int, int]
    col_range: tuple[int, int]

    def corner(self, field: Field) -> list[list]:
        YX0 = linalg.matmul(field, self.Y, self.X0) if self.Y else []
        X0Z = linalg.matmul(field, self.X0, self.Z) if self.Z and self.Z[0] else [[] for _ in self.X0]
        YX0Z = linalg.matmul(field, YX0, self.Z) if YX0 and self.Z and self.Z[0] else [[] for _ in YX0]
        top = [a + b for a, b in zip(YX0, YX0Z)]
        bottom = [a + b for a, b in zip(self.X0, X0Z)]
        return top + bottom


def corner_factorization(A: ToeplitzElement, pad_square: bool = True) -> CornerFactorization:
    """Factor the finite corner of a zero-symbol bilateral element."""
    R = A.ring
    f = R.field
    if R.model != BILATERAL or not A.symbol.is_zero():
        raise ValueError("corner factorization needs a zero-symbol bilateral element")
    if not A.dev:
        rows_lo = rows_hi = cols_lo = cols_hi = 0
    else:
        rows_lo = min(i for i, _ in A.dev)
        rows_hi = max(i for i, _ in A.dev)
        cols_lo = min(j for _, j in A.dev)
        cols_hi = max(j for _, j in A.dev)
    m, n = rows_hi + 1, cols_lo
    block = window(A, (rows_lo, rows_hi), (cols_lo, cols_hi))
    total = linalg.rank(f, block) if A.dev else 0
    height = len(block)
    c = 0
    while linalg.rank(f, block[height - c:]) < total if c else total > 0:
        c += 1
    c = max(c, 1)
    A1 = block[height - c:]
    d = 0
    while (linalg.rank(f, [r[:d] for r in A1]) if d else 0) < total:
        d += 1
    d = max(d, 1)
    if pad_square:
        c = d = max(c, d)
    # widen the window so that X0 is c x d (extra rows/columns are zero)
    rows_lo = min(rows_lo, m - c)
    cols_hi = max(cols_hi, n + d - 1)
    block = window(A, (rows_lo, m - 1), (n, cols_hi))
    height = len(block)
    A1 = block[height - c:]
    A2 = block[:height - c]
    X0 = [r[:d] for r in A1]
    rest = [r[d:] for r in A1]
    # Z with X0 Z = rest, Y with Y A1 = A2 (solved column by column)
    Z_cols = []
    for j in range(len(rest[0]) if rest and rest[0] else 0):
        sol = linalg.solve(f, X0, [r[j] for r in rest])
        if sol is None:
            raise AssertionError("columns of A1 are not spanned by X0")
        Z_cols.append(sol)
    Z = linalg.transpose(Z_cols) if Z_cols else [[] for _ in range(d)]
    Y = []
    A1t = linalg.transpose(A1)
    for row in A2:
        sol = linalg.solve(f, A1t, list(row))
        if sol is None:
            raise AssertionError("rows of A0 are not spanned by its last c rows")
        Y.append(sol)
    fac = CornerFactorization(X0, Y, Z, c, d, m, n, (rows_lo, m - 1), (n, cols_hi))
    if fac.corner(f) != [list(r) for r in block]:
        raise AssertionError("corner factorization does not reproduce the corner")
    return fac
