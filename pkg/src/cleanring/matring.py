"""Ring handles, square matrices over them, Peirce corners, the tagged ring
``[[R, I], [R, F + I]]`` with ``I = R(1 - yx)``, and tabulated finite rings.

Every ring handle exposes ``zero``, ``one``, ``add``, ``neg``, ``sub``,
``mul``, ``eq``, ``is_zero``, ``inverse`` (None for non-units), ``is_unit``,
``scalar``, ``fmt`` and, for finite rings, ``elements``/``size``.  Scalar
fields from :mod:`cleanring.scalars` follow the same protocol.
"""
from __future__ import annotations

import itertools
import random
import re
import threading
from array import array
from dataclasses import dataclass
from typing import Any, Iterator, Sequence

from . import kernels, linalg, parsing
from .freealg import FreeAlgebra, NCPoly, ReductionSystem
from .scalars import (DivisionByZero, Field, PrimeField, UnsupportedOperation, is_prime,
                      parse_field)

DEFAULT_SIZE_CAP = 4096


class ShapeError(ValueError):
    """A matrix entry violates the shape constraint of its ring."""

    def __init__(self, message: str, entry: tuple[int, int]):
        super().__init__(f"entry ({entry[0] + 1},{entry[1] + 1}): {message}")
        self.entry = entry


class Ring:
    """Base class for ring handles; subclasses fill in the arithmetic."""

    name = "?"
    is_finite = False
    zero: Any
    one: Any

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def is_zero(self, x) -> bool:
        return self.eq(x, self.zero)

    def pow(self, x, n: int):
        if n < 0:
            inv = self.inverse(x)
            if inv is None:
                raise DivisionByZero("negative power of a non-unit")
            return self.pow(inv, -n)
        out, base = self.one, x
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def sum(self, values):
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def product(self, values):
        acc = self.one
        for v in values:
            acc = self.mul(acc, v)
        return acc

    def elements(self) -> Iterator:
        raise UnsupportedOperation(f"{self.name} is not enumerable")

    def size(self) -> int:
        raise UnsupportedOperation(f"{self.name} is not enumerable")

    def inverse(self, x):
        """Two-sided inverse or None; finite rings use the tabulated unit cache."""
        if not self.is_finite:
            raise UnsupportedOperation(f"no unit procedure for {self.name}")
        t = tabulate(self)
        j = t.inverse(t.index_of(x))
        return None if j is None else t.label(j)

    def is_unit(self, x) -> bool:
        return self.inverse(x) is not None

    def scalar(self, c):
        raise UnsupportedOperation(f"{self.name} has no scalar embedding")

    def random_element(self, rng: random.Random):
        if self.is_finite:
            return rng.choice(tabulate(self).labels)
        raise UnsupportedOperation(f"no sampler for {self.name}")

    def parse(self, text: str):
        raise UnsupportedOperation(f"no element syntax for {self.name}")

    def fmt(self, x) -> str:
        return str(x)

    def to_json(self, x):
        return self.fmt(x)

    def __repr__(self) -> str:
        return self.name


# --- small commutative rings ---------------------------------------------------

class IntegersMod(Ring):
    """Z/n on the integers 0..n-1."""

    is_finite = True

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("Z/n needs n >= 2")
        self.n = n
        self.name = f"Z/{n}"
        self.zero = 0
        self.one = 1

    def add(self, x, y):
        return (x + y) % self.n

    def neg(self, x):
        return (-x) % self.n

    def mul(self, x, y):
        return (x * y) % self.n

    def eq(self, x, y) -> bool:
        return (x - y) % self.n == 0

    def elements(self):
        return iter(range(self.n))

    def size(self) -> int:
        return self.n

    def inverse(self, x):
        try:
            return pow(x, -1, self.n)
        except ValueError:
            return None

    def scalar(self, c):
        return int(c) % self.n

    def parse(self, text: str):
        return parsing.evaluate(text, _ScalarAlgebra(self))


class TruncatedPolynomials(Ring):
    """F_p[x]/(x^k); elements are coefficient tuples of length k, low degree first."""

    is_finite = True

    def __init__(self, field: PrimeField, k: int, var: str = "x"):
        if k < 1:
            raise ValueError("need k >= 1")
        self.field, self.k, self.var = field, k, var
        self.name = f"{field.name}[{var}]/({var}^{k})"
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)

    def add(self, x, y):
        return tuple(self.field.add(a, b) for a, b in zip(x, y))

    def neg(self, x):
        return tuple(self.field.neg(a) for a in x)

    def mul(self, x, y):
        f = self.field
        out = [0] * self.k
        for i, a in enumerate(x):
            if a:
                for j in range(self.k - i):
                    out[i + j] = f.add(out[i + j], f.mul(a, y[j]))
        return tuple(out)

    def eq(self, x, y) -> bool:
        return tuple(x) == tuple(y)

    def elements(self):
        p = self.field.p
        for digits in itertools.product(range(p), repeat=self.k):
            yield tuple(reversed(digits))

    def size(self) -> int:
        return self.field.p ** self.k

    def inverse(self, x):
        f = self.field
        if f.is_zero(x[0]):
            return None
        # power series inverse truncated at x^k
        inv0 = f.inv(x[0])
        out = [inv0] + [0] * (self.k - 1)
        for n in range(1, self.k):
            s = 0
            for i in range(1, n + 1):
                s = f.add(s, f.mul(x[i], out[n - i]))
            out[n] = f.neg(f.mul(inv0, s))
        return tuple(out)

    def scalar(self, c):
        return (self.field.coerce(c),) + (0,) * (self.k - 1)

    def gen(self):
        return tuple(1 if i == 1 else 0 for i in range(self.k)) if self.k > 1 else self.zero

    def parse(self, text: str):
        return parsing.evaluate(text, _ScalarAlgebra(self, {self.var: self.gen()}))

    def fmt(self, x) -> str:
        terms = []
        for i, c in enumerate(x):
            if not c:
                continue
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"


class _ScalarAlgebra:
    """Fold parsed text into a ring handle (constants, named elements, + - * ^)."""

    def __init__(self, ring, variables: dict | None = None):
        self.ring = ring
        self.variables = variables or {}

    def const(self, n):
        return self.ring.scalar(n)

    def var(self, name):
        if name in self.variables:
            return self.variables[name]
        raise ValueError(f"unknown symbol {name!r} in {self.ring.name}")

    def add(self, x, y):
        return self.ring.add(x, y)

    def sub(self, x, y):
        return self.ring.sub(x, y)

    def mul(self, x, y):
        return self.ring.mul(x, y)

    def neg(self, x):
        return self.ring.neg(x)

    def div(self, x, y):
        inv = self.ring.inverse(y)
        if inv is None:
            raise DivisionByZero("division by a non-unit")
        return self.ring.mul(x, inv)

    def pow(self, x, n):
        return self.ring.pow(x, n)


# --- quotients of free algebras ------------------------------------------------

class QuotientAlgebra(Ring):
    """F<X : rules> with elements kept as normal forms of a reduction system."""

    def __init__(self, system: ReductionSystem, name: str | None = None):
        self.system = system
        self.algebra: FreeAlgebra = system.algebra
        self.name = name or f"{self.algebra.field.name}<{','.join(self.algebra.names)}>/({len(system.rules)} rules)"
        self.zero = self.algebra.zero
        self.one = self.algebra.one

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return self.system.normal_form(x * y)

    def eq(self, x, y) -> bool:
        return self.system.normal_form(x - y).is_zero()

    def is_zero(self, x) -> bool:
        return self.system.normal_form(x).is_zero()

    def scalar(self, c):
        return self.algebra.scalar(self.algebra.field.coerce(c))

    def gen(self, name: str) -> NCPoly:
        return self.algebra.gen(name)

    def parse(self, text: str) -> NCPoly:
        return self.system.normal_form(self.algebra.parse(text))

    def inverse(self, x):
        c = self.system.normal_form(x)
        if not c.terms:
            return None
        if set(c.terms) == {()}:
            return self.algebra.scalar(self.algebra.field.inv(c.terms[()]))
        raise UnsupportedOperation(
            f"{self.name}: unit test needs a bounded inverse search (see freealg.bounded_inverse_search)")

    def random_element(self, rng: random.Random, terms: int = 3, max_len: int = 3):
        f = self.algebra.field
        n = len(self.algebra.names)
        out = {}
        for _ in range(terms):
            w = tuple(rng.randrange(n) for _ in range(rng.randint(0, max_len)))
            c = f.random_element(rng) if hasattr(f, "random_element") else f.one
            out[w] = c
        return self.system.normal_form(NCPoly(self.algebra, out))

    def fmt(self, x) -> str:
        return self.system.normal_form(x).fmt()


# --- square matrices -----------------------------------------------------------

class SquareMatrix:
    """Immutable n x n matrix over a ring handle, tied to its :class:`MatrixRing`."""

    __slots__ = ("ring", "rows", "_hash")

    def __init__(self, ring: MatrixRing, rows):
        self.ring = ring
        self.rows = tuple(tuple(r) for r in rows)
        self._hash = None

    @property
    def n(self) -> int:
        return self.ring.n

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _other(self, other) -> SquareMatrix:
        if isinstance(other, SquareMatrix):
            if other.ring.n != self.ring.n:
                raise ValueError(f"size mismatch: {self.ring.n} vs {other.ring.n}")
            return other
        return self.ring.scalar(other)

    def __add__(self, other):
        return self.ring.add(self, self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.ring.sub(self, self._other(other))

    def __rsub__(self, other):
        return self.ring.sub(self._other(other), self)

    def __neg__(self):
        return self.ring.neg(self)

    def __mul__(self, other):
        return self.ring.mul(self, self._other(other))

    def __rmul__(self, other):
        return self.ring.mul(self._other(other), self)

    def __pow__(self, n: int):
        return self.ring.pow(self, n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SquareMatrix) or other.ring.n != self.ring.n:
            return NotImplemented
        return self.ring.eq(self, other)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self) -> str:
        return self.ring.fmt(self)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]


class MatrixRing(Ring):
    """M_n(base), optionally restricted to upper-triangular matrices (``shape='upper'``)."""

    def __init__(self, base, n: int, shape: str | None = None):
        if n < 1:
            raise ValueError("matrix size must be >= 1")
        if shape not in (None, "upper"):
            raise ValueError(f"unknown shape {shape!r}")
        self.base = base
        self.n = n
        self.shape = shape
        prefix = "T" if shape == "upper" else "M"
        self.name = f"{prefix}{n}({base.name})"
        self.is_finite = bool(getattr(base, "is_finite", False))
        z, o = base.zero, base.one
        self.zero = SquareMatrix(self, [[z] * n for _ in range(n)])
        self.one = SquareMatrix(self, [[o if i == j else z for j in range(n)] for i in range(n)])

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixRing) and (self.name, self.n, self.shape) == (other.name, other.n, other.shape)

    def __hash__(self) -> int:
        return hash((self.name, self.n, self.shape))

    def allowed(self, i: int, j: int) -> bool:
        return self.shape is None or i <= j

    def make(self, rows) -> SquareMatrix:
        """Build a matrix, checking size and shape; entries go through ``base.scalar``
        when they are plain integers."""
        rows = [list(r) for r in rows]
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise ValueError(f"{self.name} needs a {self.n}x{self.n} array")
        base = self.base
        for i in range(self.n):
            for j in range(self.n):
                if isinstance(rows[i][j], int) and not isinstance(rows[i][j], bool):
                    rows[i][j] = base.scalar(rows[i][j])
                if not self.allowed(i, j) and not base.is_zero(rows[i][j]):
                    raise ShapeError(f"must be zero in {self.name}", (i, j))
        return SquareMatrix(self, rows)

    def check(self, A: SquareMatrix) -> SquareMatrix:
        for i in range(self.n):
            for j in range(self.n):
                if not self.allowed(i, j) and not self.base.is_zero(A.rows[i][j]):
                    raise ShapeError(f"must be zero in {self.name}", (i, j))
        return A

    def add(self, A, B):
        b = self.base
        return SquareMatrix(self, [[b.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(A.rows, B.rows)])

    def neg(self, A):
        b = self.base
        return SquareMatrix(self, [[b.neg(x) for x in r] for r in A.rows])

    def sub(self, A, B):
        b = self.base
        return SquareMatrix(self, [[b.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(A.rows, B.rows)])

    def mul(self, A, B):
        b = self.base
        n = self.n
        cols = list(zip(*B.rows))
        out = []
        for r in A.rows:
            row = []
            for c in cols:
                acc = b.zero
                for k in range(n):
                    x = r[k]
                    if b.is_zero(x):
                        continue
                    acc = b.add(acc, b.mul(x, c[k]))
                row.append(acc)
            out.append(row)
        return SquareMatrix(self, out)

    def eq(self, A, B) -> bool:
        b = self.base
        return all(b.eq(x, y) for ra, rb in zip(A.rows, B.rows) for x, y in zip(ra, rb))

    def is_zero(self, A) -> bool:
        return all(self.base.is_zero(x) for r in A.rows for x in r)

    def scalar(self, c) -> SquareMatrix:
        b = self.base
        s = c if not isinstance(c, int) else b.scalar(c)
        return SquareMatrix(self, [[s if i == j else b.zero for j in range(self.n)] for i in range(self.n)])

    def diag(self, *entries) -> SquareMatrix:
        b = self.base
        vals = [b.scalar(x) if isinstance(x, int) else x for x in entries]
        return SquareMatrix(self, [[vals[i] if i == j else b.zero for j in range(self.n)] for i in range(self.n)])

    def elements(self) -> Iterator[SquareMatrix]:
        """All matrices; entry (0,0) varies fastest, then (0,1), ... (row-major)."""
        if not self.is_finite:
            raise UnsupportedOperation(f"{self.name} is not enumerable")
        vals = list(self.base.elements())
        z = self.base.zero
        positions = [(i, j) for i in range(self.n) for j in range(self.n)]
        choices = [vals if self.allowed(i, j) else [z] for i, j in positions]
        for combo in itertools.product(*reversed(choices)):
            flat = list(reversed(combo))
            yield SquareMatrix(self, [flat[i * self.n:(i + 1) * self.n] for i in range(self.n)])

    def size(self) -> int:
        if not self.is_finite:
            raise UnsupportedOperation(f"{self.name} is not enumerable")
        free = sum(1 for i in range(self.n) for j in range(self.n) if self.allowed(i, j))
        return self.base.size() ** free

    def inverse(self, A):
        """Elimination over fields; unit cache for finite bases; else unsupported."""
        if isinstance(self.base, Field):
            inv = linalg.inverse(self.base, [list(r) for r in A.rows])
            if inv is None:
                return None
            B = SquareMatrix(self, inv)
        elif self.is_finite:
            B = Ring.inverse(self, A)
            if B is None:
                return None
        else:
            raise UnsupportedOperation(f"no inverse procedure for matrices over {self.base.name}")
        if not (self.mul(A, B) == self.one and self.mul(B, A) == self.one):
            raise AssertionError("inverse failed re-verification")
        return B

    def random_element(self, rng: random.Random):
        b = self.base
        return SquareMatrix(self, [[b.random_element(rng) if self.allowed(i, j) else b.zero
                                    for j in range(self.n)] for i in range(self.n)])

    def parse(self, text: str) -> SquareMatrix:
        rows = parsing.parse_matrix_literal(text)
        if len(rows) != self.n:
            raise ValueError(f"{self.name} needs a {self.n}x{self.n} literal")
        return self.make([[self.base.parse(x) for x in r] for r in rows])

    def fmt(self, A) -> str:
        return "[" + ",".join("[" + ",".join(self.base.fmt(x) for x in r) + "]" for r in A.rows) + "]"

    def to_json(self, A):
        return [[self.base.to_json(x) for x in r] for r in A.rows]

    def code(self, A) -> int:
        """Base-p code of a matrix over F_p: entry k (row-major) is digit k."""
        p = self.base.p
        return sum(int(x) * p ** k for k, x in enumerate(x for r in A.rows for x in r))


def mat_arith(A: SquareMatrix, B: SquareMatrix | None, op: str):
    """Entry-wise/row-column arithmetic with the shape constraint re-checked."""
    if B is not None and A.ring.n != B.ring.n:
        raise ValueError(f"size mismatch: {A.ring.n} vs {B.ring.n}")
    R = A.ring
    if op == "add":
        return R.check(R.add(A, B))
    if op == "mul":
        return R.check(R.mul(A, B))
    if op == "neg":
        return R.check(R.neg(A))
    if op == "eq":
        return R.eq(A, B)
    raise ValueError(f"unknown matrix operation {op!r}")


def find_inverse(A):
    """Two-sided inverse of a matrix (or any ring element with a handle), or None."""
    ring = A.ring if isinstance(A, SquareMatrix) else None
    if ring is None:
        raise UnsupportedOperation("find_inverse expects a SquareMatrix")
    B = ring.inverse(A)
    if B is not None and not (ring.mul(A, B) == ring.one and ring.mul(B, A) == ring.one):
        raise AssertionError("inverse failed re-verification")
    return B


# --- tabulated finite rings ----------------------------------------------------

class FiniteRing(Ring):
    """A finite ring on indices 0..N-1 with flat add/mul tables.

    ``labels[i]`` is the element of the source handle; ``index_of`` maps back.
    Units, idempotents and inverse tables are computed once, on demand,
    through the kernel backend.
    """

    is_finite = True

    def __init__(self, name: str, labels: list, add_table, mul_table, zero: int, one: int, source=None):
        self.name = name
        self.labels = labels
        self.N = len(labels)
        self.addt = add_table
        self.mult = mul_table
        self.zero = zero
        self.one = one
        self.source = source
        self._index = {x: i for i, x in enumerate(labels)}
        self._lock = threading.Lock()
        self._units: dict[int, int] | None = None
        self._idem: list[int] | None = None
        self._negt = None

    @classmethod
    def from_handle(cls, handle, cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
        n = handle.size()
        if n > cap:
            raise UnsupportedOperation(f"{handle.name} has {n} elements, above the cap {cap}")
        if isinstance(handle, MatrixRing) and handle.shape is None and isinstance(handle.base, PrimeField):
            labels = list(handle.elements())
            mult = kernels.matmul_table(handle.n, handle.base.p)
        else:
            labels = list(handle.elements())
            index = {x: i for i, x in enumerate(labels)}
            mult = array("i", bytes(4 * n * n))
            for i, x in enumerate(labels):
                base = i * n
                for j, y in enumerate(labels):
                    mult[base + j] = index[handle.mul(x, y)]
        index = {x: i for i, x in enumerate(labels)}
        addt = array("i", bytes(4 * n * n))
        for i, x in enumerate(labels):
            base = i * n
            for j in range(i, n):
                k = index[handle.add(x, labels[j])]
                addt[base + j] = k
                addt[j * n + i] = k
        return cls(handle.name, labels, addt, mult, index[handle.zero], index[handle.one], handle)

    # arithmetic on indices
    def add(self, i, j):
        return self.addt[i * self.N + j]

    def mul(self, i, j):
        return self.mult[i * self.N + j]

    def neg(self, i):
        if self._negt is None:
            N = self.N
            z = self.zero
            neg = [0] * N
            for x in range(N):
                row = x * N
                for y in range(N):
                    if self.addt[row + y] == z:
                        neg[x] = y
                        break
            self._negt = neg
        return self._negt[i]

    def sub(self, i, j):
        return self.add(i, self.neg(j))

    def eq(self, i, j) -> bool:
        return i == j

    def is_zero(self, i) -> bool:
        return i == self.zero

    def elements(self):
        return iter(range(self.N))

    def size(self) -> int:
        return self.N

    def label(self, i):
        return self.labels[i]

    def index_of(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise ValueError(f"{x!r} is not an element of {self.name}") from None

    def units(self) -> dict[int, int]:
        with self._lock:
            if self._units is None:
                self._units = dict(kernels.units(self.mult, self.N, self.one))
            return self._units

    def inverse(self, i):
        return self.units().get(i)

    def is_unit(self, i) -> bool:
        return i in self.units()

    def idempotents(self) -> list[int]:
        with self._lock:
            if self._idem is None:
                self._idem = kernels.idempotents(self.mult, self.N)
            return self._idem

    def inner_inverses(self, a: int) -> list[int]:
        return kernels.inner_inverses(self.mult, self.N, a)

    def right_ideal(self, a: int) -> list[int]:
        return kernels.right_ideal(self.mult, self.N, a)

    def scalar(self, c):
        acc = self.zero
        for _ in range(abs(int(c))):
            acc = self.add(acc, self.one)
        return acc if c >= 0 else self.neg(acc)

    def random_element(self, rng: random.Random):
        return rng.randrange(self.N)

    def fmt(self, i) -> str:
        src = self.source
        return src.fmt(self.labels[i]) if src is not None else str(self.labels[i])

    def to_json(self, i):
        src = self.source
        return src.to_json(self.labels[i]) if src is not None else self.labels[i]


_TABLE_LOCK = threading.Lock()


def tabulate(handle, cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
    """Tabulated copy of a finite handle, built once and cached on the handle."""
    if isinstance(handle, FiniteRing):
        return handle
    with _TABLE_LOCK:
        table = getattr(handle, "_finite_table", None)
        if table is None:
            table = FiniteRing.from_handle(handle, cap)
            handle._finite_table = table
        return table


def right_ideal_meets_zero(ring, a, b) -> bool:
    """True iff aR and bR intersect only in 0 (by enumeration)."""
    if not getattr(ring, "is_finite", False):
        raise UnsupportedOperation(f"{ring.name} is not enumerable")
    t = tabulate(ring)
    ia, ib = (a, b) if isinstance(ring, FiniteRing) else (t.index_of(a), t.index_of(b))
    common = set(t.right_ideal(ia)) & set(t.right_ideal(ib))
    return common == {t.zero}


# --- Peirce corners ------------------------------------------------------------

class CornerView(Ring):
    """The corner ring eRe of an ambient handle, with identity e."""

    def __init__(self, ambient, e):
        self.ambient = ambient
        self.e = e
        self.f = ambient.sub(ambient.one, e)
        self.name = f"e{ambient.name}e"
        self.zero = ambient.zero
        self.one = e
        self.is_finite = bool(getattr(ambient, "is_finite", False))

    def inject(self, x):
        A = self.ambient
        return A.mul(A.mul(self.e, x), self.e)

    def contains(self, x) -> bool:
        return self.ambient.eq(self.inject(x), x)

    def add(self, x, y):
        return self.ambient.add(x, y)

    def neg(self, x):
        return self.ambient.neg(x)

    def sub(self, x, y):
        return self.ambient.sub(x, y)

    def mul(self, x, y):
        return self.ambient.mul(x, y)

    def eq(self, x, y) -> bool:
        return self.ambient.eq(x, y)

    def is_zero(self, x) -> bool:
        return self.ambient.is_zero(x)

    def scalar(self, c):
        return self.ambient.mul(self.ambient.scalar(c), self.e)

    def elements(self):
        seen = set()
        for x in self.ambient.elements():
            y = self.inject(x)
            if y not in seen:
                seen.add(y)
                yield y

    def size(self) -> int:
        return sum(1 for _ in self.elements())

    def inverse(self, x):
        """Inverse relative to e: x + (1 - e) is a unit iff x is a unit of eRe."""
        A = self.ambient
        z = A.inverse(A.add(x, self.f))
        if z is None:
            return None
        y = self.inject(z)
        if not (A.eq(A.mul(x, y), self.e) and A.eq(A.mul(y, x), self.e)):
            raise AssertionError("corner inverse failed re-verification")
        return y

    def random_element(self, rng: random.Random):
        return self.inject(self.ambient.random_element(rng))

    def fmt(self, x) -> str:
        return self.ambient.fmt(x)

    def to_json(self, x):
        return self.ambient.to_json(x)


def peirce_corner(ring, e) -> CornerView:
    if not ring.eq(ring.mul(e, e), e):
        raise ValueError(f"{ring.fmt(e)} is not idempotent")
    return CornerView(ring, e)


def peirce_blocks(ring, e, x) -> tuple:
    """(exe, exf, fxe, fxf) for f = 1 - e."""
    f = ring.sub(ring.one, e)
    m = ring.mul
    return m(m(e, x), e), m(m(e, x), f), m(m(f, x), e), m(m(f, x), f)


# --- the tagged ring S = [[R, I], [R, F + I]] -----------------------------------

@dataclass(frozen=True)
class TaggedEntry:
    """Entry of a tagged matrix.

    ``full``: an arbitrary element ``value`` of R.
    ``cofactor``: the element ``value * g`` of I = Rg.
    ``scalar+cofactor``: ``scalar + value * g`` in F + I.
    """
    kind: str
    value: Any
    scalar: Any = None

    @classmethod
    def full(cls, x):
        return cls("full", x)

    @classmethod
    def cofactor(cls, q):
        return cls("cofactor", q)

    @classmethod
    def scalar_plus(cls, lam, q):
        return cls("scalar+cofactor", q, lam)


class TaggedMatrix:
    __slots__ = ("ring", "a11", "q12", "a21", "lam22", "q22")

    def __init__(self, ring: TaggedRing, a11, q12, a21, lam22, q22):
        self.ring = ring
        self.a11, self.q12, self.a21, self.lam22, self.q22 = a11, q12, a21, lam22, q22

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
        if not isinstance(other, TaggedMatrix):
            return NotImplemented
        return self.ring.eq(self, other)

    def __hash__(self) -> int:
        return hash((self.a11, self.q12, self.a21, self.lam22, self.q22))

    def __repr__(self) -> str:
        return self.ring.fmt(self)


class TaggedRing(Ring):
    """S = [[R, I], [R, F + I]] inside M_2(R), I = R g for a fixed g in R.

    Ideal entries are stored as cofactors q of g.  Equality compares cofactors,
    which is sound when g is not a right zero divisor (q g = 0 forces q = 0).
    """

    def __init__(self, base: QuotientAlgebra, g: NCPoly):
        self.base = base
        self.g = base.system.normal_form(g)
        self.name = f"S({base.name})"
        F = base.algebra.field
        z = base.zero
        self.field = F
        self.zero = TaggedMatrix(self, z, z, z, F.zero, z)
        self.one = TaggedMatrix(self, base.one, z, z, F.one, z)
        self.matrices = MatrixRing(base, 2)

    def make(self, entries: Sequence[Sequence[TaggedEntry]]) -> TaggedMatrix:
        (e11, e12), (e21, e22) = entries
        expect = {(0, 0): ("full",), (0, 1): ("cofactor",), (1, 0): ("full",),
                  (1, 1): ("scalar+cofactor", "cofactor")}
        for (i, j), ent in zip(((0, 0), (0, 1), (1, 0), (1, 1)), (e11, e12, e21, e22)):
            if not isinstance(ent, TaggedEntry) or ent.kind not in expect[(i, j)]:
                kind = getattr(ent, "kind", type(ent).__name__)
                raise ShapeError(f"{kind} entry not allowed here, need {' or '.join(expect[(i, j)])}", (i, j))
        nf = self.base.system.normal_form
        lam = e22.scalar if e22.kind == "scalar+cofactor" else self.field.zero
        return TaggedMatrix(self, nf(e11.value), nf(e12.value), nf(e21.value),
                            self.field.coerce(lam), nf(e22.value))

    def add(self, A, B):
        F = self.field
        return TaggedMatrix(self, A.a11 + B.a11, A.q12 + B.q12, A.a21 + B.a21,
                            F.add(A.lam22, B.lam22), A.q22 + B.q22)

    def neg(self, A):
        return TaggedMatrix(self, -A.a11, -A.q12, -A.a21, self.field.neg(A.lam22), -A.q22)

    def mul(self, A, B):
        nf = self.base.system.normal_form
        g = self.g
        F = self.field
        lamA = self.base.algebra.scalar(A.lam22)
        lamB = self.base.algebra.scalar(B.lam22)
        a11 = nf(A.a11 * B.a11 + A.q12 * g * B.a21)
        q12 = nf(A.a11 * B.q12 + A.q12 * lamB + A.q12 * g * B.q22)
        a21 = nf(A.a21 * B.a11 + (lamA + A.q22 * g) * B.a21)
        q22 = nf(A.a21 * B.q12 + lamA * B.q22 + A.q22 * lamB + A.q22 * g * B.q22)
        return TaggedMatrix(self, a11, q12, a21, F.mul(A.lam22, B.lam22), q22)

    def eq(self, A, B) -> bool:
        nf = self.base.system.normal_form
        return (nf(A.a11 - B.a11).is_zero() and nf(A.q12 - B.q12).is_zero()
                and nf(A.a21 - B.a21).is_zero() and self.field.eq(A.lam22, B.lam22)
                and nf(A.q22 - B.q22).is_zero())

    def to_matrix(self, A) -> SquareMatrix:
        """The plain 2x2 matrix over R represented by a tagged matrix."""
        nf = self.base.system.normal_form
        g = self.g
        lam = self.base.algebra.scalar(A.lam22)
        return self.matrices.make([[A.a11, nf(A.q12 * g)], [A.a21, nf(lam + A.q22 * g)]])

    def inverse(self, A):
        raise UnsupportedOperation(f"no unit procedure for {self.name}")

    def scalar(self, c):
        F = self.field
        c = F.coerce(c)
        s = self.base.algebra.scalar(c)
        z = self.base.zero
        return TaggedMatrix(self, s, z, z, c, z)

    def random_element(self, rng: random.Random):
        b = self.base
        F = self.field
        lam = F.random_element(rng) if hasattr(F, "random_element") else F.one
        return TaggedMatrix(self, b.random_element(rng), b.random_element(rng), b.random_element(rng),
                            lam, b.random_element(rng))

    def fmt(self, A) -> str:
        return self.matrices.fmt(self.to_matrix(A))


def xy_ring(field: Field | str = "F2") -> QuotientAlgebra:
    """R = F<x, y : x^2 = 0>."""
    if isinstance(field, str):
        field = parse_field(field)
    from .freealg import Rule
    alg = FreeAlgebra(field, ["x", "y"])
    system = ReductionSystem(alg, [Rule(alg.word("x*x"), alg.zero)])
    return QuotientAlgebra(system, f"{field.name}<x,y:x^2=0>")


def tagged_ring(field: Field | str = "F2") -> TaggedRing:
    """S = [[R, I], [R, F + I]] with R = F<x,y : x^2=0> and I = R(1 - yx)."""
    R = xy_ring(field)
    return TaggedRing(R, R.parse("1 - y*x"))


# --- ring selectors ------------------------------------------------------------

_MATRIX_RE = re.compile(r"^([MT])(\d+)\((.+)\)$")
_ZMOD_RE = re.compile(r"^Z/(\d+)$")
_TRUNC_RE = re.compile(r"^F(\d+)\[([A-Za-z_]\w*)\]/\(\2\^(\d+)\)$")


def parse_ring(selector: str):
    """``M2(F2)``, ``M3(F2)``, ``T2(F2)``, ``Z/6``, ``F2[x]/(x^2)``, ``F5``, ``M2(Q)``, ``M2(F5(x))``."""
    s = selector.strip().replace(" ", "")
    m = _MATRIX_RE.match(s)
    if m:
        kind, n, inner = m.groups()
        return MatrixRing(parse_ring(inner), int(n), "upper" if kind == "T" else None)
    m = _ZMOD_RE.match(s)
    if m:
        return IntegersMod(int(m.group(1)))
    m = _TRUNC_RE.match(s)
    if m:
        p, var, k = m.groups()
        if not is_prime(int(p)):
            raise ValueError(f"F{p} is not a prime field")
        return TruncatedPolynomials(PrimeField(int(p)), int(k), var)
    try:
        return parse_field(s)
    except ValueError:
        raise ValueError(f"unknown ring selector {selector!r}") from None
