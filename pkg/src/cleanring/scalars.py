"""Exact coefficient fields: Q, F_p, rational function fields F(t), and
Laurent polynomials with series-coefficient extraction for rational functions.

Field objects share one duck-typed interface (``zero``, ``one``, ``add``,
``sub``, ``neg``, ``mul``, ``inv``, ``div``, ``eq``, ``is_zero``, ``coerce``,
``parse``, ``fmt``).  Element values are plain Python objects: ``Fraction``
for Q, ``int`` in ``range(p)`` for F_p and :class:`RationalFunction` for F(t).
"""
from __future__ import annotations

import math
import random
import threading
from fractions import Fraction
from typing import Any, Iterator

from . import parsing

INFINITE_VALUATION = math.inf


class DivisionByZero(ZeroDivisionError):
    """Inverse of zero requested in an exact field."""


class UnsupportedOperation(TypeError):
    """The ring or field handle does not provide the requested procedure."""


class Field:
    name = "?"
    is_finite = False
    characteristic = 0

    zero: Any
    one: Any

    # ring-handle protocol (fields are rings in which nonzero means unit)
    def is_unit(self, x) -> bool:
        return not self.is_zero(x)

    def inverse(self, x):
        return None if self.is_zero(x) else self.inv(x)

    def scalar(self, c):
        return self.coerce(c)

    def elements(self) -> Iterator:
        raise UnsupportedOperation(f"{self.name} is not enumerable")

    def size(self) -> int:
        raise UnsupportedOperation(f"{self.name} is not enumerable")

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def is_zero(self, x) -> bool:
        return self.eq(x, self.zero)

    def pow(self, x, n: int):
        if n < 0:
            return self.pow(self.inv(x), -n)
        result, base = self.one, x
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def sum(self, values) -> Any:
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def from_int(self, n: int):
        return self.coerce(n)

    def parse(self, text: str):
        return parsing.evaluate(text, _FieldAlgebra(self))

    def fmt(self, x) -> str:
        return str(x)

    def to_json(self, x):
        return self.fmt(x)

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)


class Rationals(Field):
    name = "Q"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        if x == 0:
            raise DivisionByZero("inverse of 0 in Q")
        return 1 / Fraction(x)

    def div(self, x, y):
        if y == 0:
            raise DivisionByZero("division by 0 in Q")
        return Fraction(x) / y

    def eq(self, x, y) -> bool:
        return x == y

    def is_zero(self, x) -> bool:
        return x == 0

    def coerce(self, v):
        if isinstance(v, (int, Fraction)):
            return Fraction(v)
        if isinstance(v, str):
            return self.parse(v)
        raise TypeError(f"cannot coerce {v!r} into Q")

    def random_element(self, rng: random.Random, height: int = 5):
        den = rng.randint(1, height)
        return Fraction(rng.randint(-height, height), den)

    def fmt(self, x) -> str:
        return str(Fraction(x))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeField(Field):
    is_finite = True

    def __init__(self, p: int):
        if not (is_prime(p) and p < 2**31):
            raise ValueError(f"F_p needs a prime p < 2^31, got {p}")
        self.p = p
        self.characteristic = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1 % p

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def mul(self, x, y):
        return (x * y) % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise DivisionByZero(f"inverse of 0 in {self.name}")
        return pow(x, -1, self.p)

    def eq(self, x, y) -> bool:
        return (x - y) % self.p == 0

    def is_zero(self, x) -> bool:
        return x % self.p == 0

    def coerce(self, v):
        if isinstance(v, int):
            return v % self.p
        if isinstance(v, Fraction):
            return self.div(v.numerator % self.p, v.denominator % self.p)
        if isinstance(v, str):
            return self.parse(v)
        raise TypeError(f"cannot coerce {v!r} into {self.name}")

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def size(self) -> int:
        return self.p

    def random_element(self, rng: random.Random):
        return rng.randrange(self.p)

    def fmt(self, x) -> str:
        return str(x % self.p)

    def to_json(self, x):
        return x % self.p


QQ = Rationals()


class _FieldAlgebra:
    """Adapter so :func:`parsing.evaluate` folds text into a field."""

    def __init__(self, field: Field, variables: dict | None = None):
        self.field = field
        self.variables = variables or {}

    def const(self, n):
        return self.field.coerce(n)

    def var(self, name):
        if name in self.variables:
            return self.variables[name]
        raise ValueError(f"unknown symbol {name!r} for field {self.field.name}")

    def add(self, x, y):
        return self.field.add(x, y)

    def sub(self, x, y):
        return self.field.sub(x, y)

    def mul(self, x, y):
        return self.field.mul(x, y)

    def neg(self, x):
        return self.field.neg(x)

    def div(self, x, y):
        return self.field.div(x, y)

    def pow(self, x, n):
        return self.field.pow(x, n)


# --- dense univariate polynomials (tuples, low degree first, trimmed) -------

def poly_trim(field: Field, c) -> tuple:
    c = list(c)
    while c and field.is_zero(c[-1]):
        c.pop()
    return tuple(c)


def poly_add(field: Field, a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else field.zero
        y = b[i] if i < len(b) else field.zero
        out.append(field.add(x, y))
    return poly_trim(field, out)


def poly_neg(field: Field, a: tuple) -> tuple:
    return tuple(field.neg(x) for x in a)


def poly_mul(field: Field, a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if field.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(x, y))
    return poly_trim(field, out)


def poly_scale(field: Field, a: tuple, c) -> tuple:
    return poly_trim(field, [field.mul(x, c) for x in a])


def poly_divmod(field: Field, a: tuple, b: tuple) -> tuple[tuple, tuple]:
    if not b:
        raise DivisionByZero("polynomial division by zero")
    rem = list(a)
    q = [field.zero] * max(len(a) - len(b) + 1, 0)
    lead_inv = field.inv(b[-1])
    for shift in range(len(a) - len(b), -1, -1):
        c = field.mul(rem[shift + len(b) - 1], lead_inv)
        q[shift] = c
        if field.is_zero(c):
            continue
        for j, y in enumerate(b):
            rem[shift + j] = field.sub(rem[shift + j], field.mul(c, y))
    return poly_trim(field, q), poly_trim(field, rem)


def poly_gcd(field: Field, a: tuple, b: tuple) -> tuple:
    while b:
        a, b = b, poly_divmod(field, a, b)[1]
    if not a:
        return ()
    return poly_scale(field, a, field.inv(a[-1]))


def poly_order(field: Field, a: tuple) -> int:
    """Lowest exponent with a nonzero coefficient (t-adic order)."""
    for i, x in enumerate(a):
        if not field.is_zero(x):
            return i
    raise ValueError("order of the zero polynomial")


# --- rational functions ------------------------------------------------------

_SERIES_LOCK = threading.Lock()


class RationalFunction:
    """``num/den`` over a base field; coprime, ``den`` monic, zero is ``0/1``.

    Treat as immutable.  The Laurent expansion at t = 0 is cached lazily.
    """

    __slots__ = ("base", "num", "den", "_series", "_hash")

    def __init__(self, base: Field, num, den=None, *, _canonical: bool = False):
        self.base = base
        num = poly_trim(base, num)
        den = poly_trim(base, den if den is not None else (base.one,))
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        if not _canonical:
            if not num:
                den = (base.one,)
            else:
                g = poly_gcd(base, num, den)
                if len(g) > 1:
                    num = poly_divmod(base, num, g)[0]
                    den = poly_divmod(base, den, g)[0]
                lead = base.inv(den[-1])
                num = poly_scale(base, num, lead)
                den = poly_scale(base, den, lead)
        self.num = num
        self.den = den
        self._series = None
        self._hash = None

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def degree(self) -> int:
        """Polynomial degree of the numerator minus that of the denominator."""
        if not self.num:
            return -1 if self.is_polynomial() else -math.inf
        return len(self.num) - len(self.den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self) -> str:
        return f"RationalFunction({self.num}, {self.den})"

    def series_coefficient(self, k: int):
        """Coefficient of t^k in the Laurent expansion at t = 0."""
        base = self.base
        if not self.num:
            return base.zero
        with _SERIES_LOCK:
            if self._series is None:
                v = poly_order(base, self.den)
                q0 = self.den[v:]
                self._series = (v, q0, base.inv(q0[0]), [])
            v, q0, lead_inv, coeffs = self._series
            n = k + v
            if n < 0:
                return base.zero
            # power series of num/q0: c_n = (num_n - sum_{i>=1} q0_i c_{n-i}) / q0_0
            while len(coeffs) <= n:
                m = len(coeffs)
                acc = self.num[m] if m < len(self.num) else base.zero
                for i in range(1, min(m, len(q0) - 1) + 1):
                    acc = base.sub(acc, base.mul(q0[i], coeffs[m - i]))
                coeffs.append(base.mul(acc, lead_inv))
            return coeffs[n]


class RationalFunctionField(Field):
    """F(var) over a base field."""

    def __init__(self, base: Field, var: str = "t"):
        self.base = base
        self.var = var
        self.name = f"{base.name}({var})"
        self.characteristic = base.characteristic
        self.zero = RationalFunction(base, ())
        self.one = RationalFunction(base, (base.one,))
        self.gen = RationalFunction(base, (base.zero, base.one))

    def make(self, num, den=None) -> RationalFunction:
        return RationalFunction(self.base, [self.base.coerce(c) for c in num],
                                None if den is None else [self.base.coerce(c) for c in den])

    def add(self, x, y):
        b = self.base
        if x.den == y.den:
            return RationalFunction(b, poly_add(b, x.num, y.num), x.den)
        return RationalFunction(b, poly_add(b, poly_mul(b, x.num, y.den), poly_mul(b, y.num, x.den)),
                                poly_mul(b, x.den, y.den))

    def neg(self, x):
        return RationalFunction(self.base, poly_neg(self.base, x.num), x.den, _canonical=True)

    def mul(self, x, y):
        b = self.base
        if x.is_polynomial() and y.is_polynomial():
            return RationalFunction(b, poly_mul(b, x.num, y.num), _canonical=True)
        return RationalFunction(b, poly_mul(b, x.num, y.num), poly_mul(b, x.den, y.den))

    def inv(self, x):
        if x.is_zero():
            raise DivisionByZero(f"inverse of 0 in {self.name}")
        return RationalFunction(self.base, x.den, x.num)

    def eq(self, x, y) -> bool:
        return x == y

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def coerce(self, v):
        if isinstance(v, RationalFunction):
            return v
        if isinstance(v, str):
            return self.parse(v)
        return RationalFunction(self.base, (self.base.coerce(v),))

    def parse(self, text: str):
        return parsing.evaluate(text, _FieldAlgebra(self, {self.var: self.gen}))

    def random_element(self, rng: random.Random, degree: int = 3):
        b = self.base
        num = [b.random_element(rng) for _ in range(rng.randint(0, degree) + 1)]
        den = [b.random_element(rng) for _ in range(rng.randint(0, degree))] + [b.one]
        return RationalFunction(b, num, den)

    def fmt(self, x) -> str:
        num = _fmt_poly(self.base, x.num, self.var)
        if x.is_polynomial():
            return num
        return f"({num})/({_fmt_poly(self.base, x.den, self.var)})"


def _fmt_poly(base: Field, coeffs: tuple, var: str) -> str:
    if not coeffs:
        return "0"
    return _fmt_terms(base, [(i, c) for i, c in enumerate(coeffs) if not base.is_zero(c)], var)


def _fmt_terms(base: Field, terms, var: str) -> str:
    parts = []
    for e, c in terms:
        s = base.fmt(c)
        neg = s.startswith("-")
        if neg:
            s = s[1:]
        if e == 0:
            mono = s
        else:
            pw = var if e == 1 else f"{var}^{e}" if e > 0 else f"{var}^({e})"
            mono = pw if s == "1" else f"{s}*{pw}"
        if not parts:
            parts.append(("-" if neg else "") + mono)
        else:
            parts.append((" - " if neg else " + ") + mono)
    return "".join(parts)


# --- Laurent polynomials ----------------------------------------------------

class LaurentPolynomial:
    """Finite sum of c_k t^k, k in Z, stored as ``{k: c}`` with no zero values."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: Field, coeffs: dict | None = None):
        self.field = field
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if not field.is_zero(c)}
        self._hash = None

    @classmethod
    def monomial(cls, field: Field, k: int, c=None) -> LaurentPolynomial:
        return cls(field, {k: field.one if c is None else field.coerce(c)})

    @classmethod
    def constant(cls, field: Field, c) -> LaurentPolynomial:
        return cls(field, {0: field.coerce(c)})

    def coeff(self, k: int):
        return self.coeffs.get(k, self.field.zero)

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def valuation(self):
        return min(self.coeffs) if self.coeffs else INFINITE_VALUATION

    def degree(self):
        return max(self.coeffs) if self.coeffs else -INFINITE_VALUATION

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def __add__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        f = self.field
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = f.add(out[k], c) if k in out else c
        return LaurentPolynomial(f, out)

    def __neg__(self) -> LaurentPolynomial:
        return LaurentPolynomial(self.field, {k: self.field.neg(c) for k, c in self.coeffs.items()})

    def __sub__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        return self + (-other)

    def __mul__(self, other) -> LaurentPolynomial:
        f = self.field
        if not isinstance(other, LaurentPolynomial):
            c = f.coerce(other)
            return LaurentPolynomial(f, {k: f.mul(v, c) for k, v in self.coeffs.items()})
        out: dict = {}
        for i, x in self.coeffs.items():
            for j, y in other.coeffs.items():
                k = i + j
                p = f.mul(x, y)
                out[k] = f.add(out[k], p) if k in out else p
        return LaurentPolynomial(f, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPolynomial:
        if n < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent-polynomial inverses")
            (k, c), = self.coeffs.items()
            return LaurentPolynomial(self.field, {k * n: self.field.pow(c, n)})
        out = LaurentPolynomial.constant(self.field, 1)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, s: int) -> LaurentPolynomial:
        return LaurentPolynomial(self.field, {k + s: c for k, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.fmt()})"

    def fmt(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        return _fmt_terms(self.field, sorted(self.coeffs.items()), var)

    def to_rational_function(self) -> RationalFunction:
        v = self.valuation()
        if v is INFINITE_VALUATION:
            return RationalFunction(self.field, ())
        f = self.field
        top = self.degree()
        num = [self.coeff(k) for k in range(v, top + 1)]
        if v >= 0:
            return RationalFunction(f, [f.zero] * v + num)
        return RationalFunction(f, num, [f.zero] * (-v) + [f.one])


class _LaurentAlgebra:
    def __init__(self, field: Field, var: str):
        self.field = field
        self.name = var

    def const(self, n):
        return LaurentPolynomial.constant(self.field, n)

    def var(self, name):
        if name != self.name:
            raise ValueError(f"unknown symbol {name!r}; Laurent variable is {self.name!r}")
        return LaurentPolynomial.monomial(self.field, 1)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def div(self, x, y):
        if not y.is_monomial():
            raise ValueError("division only by monomials in Laurent polynomials")
        return x * (y ** -1)

    def pow(self, x, n):
        return x ** n


def parse_laurent(text: str, field: Field, var: str = "t") -> LaurentPolynomial:
    return parsing.evaluate(text, _LaurentAlgebra(field, var))


# --- functional interface --------------------------------------------------

def laurent_coeff(f, k: int):
    """Coefficient of t^k in the Laurent expansion of ``f`` at t = 0.

    Accepts a :class:`RationalFunction` or a :class:`LaurentPolynomial`.
    """
    if isinstance(f, LaurentPolynomial):
        return f.coeff(k)
    return f.series_coefficient(k)


def valuation(f):
    """Least k with nonzero coefficient; :data:`INFINITE_VALUATION` for 0."""
    if isinstance(f, LaurentPolynomial):
        return f.valuation()
    if f.is_zero():
        return INFINITE_VALUATION
    return poly_order(f.base, f.num) - poly_order(f.base, f.den)


def field_arith(field: Field, x, y=None, op: str = "add"):
    """Single dispatch entry for ``add``/``mul``/``neg``/``inv``/``eq``."""
    if op == "add":
        return field.add(x, y)
    if op == "mul":
        return field.mul(x, y)
    if op == "neg":
        return field.neg(x)
    if op == "inv":
        return field.inv(x)
    if op == "eq":
        return field.eq(x, y)
    raise ValueError(f"unknown field operation {op!r}")


def parse_field(selector: str) -> Field:
    """``Q``, ``F5``, ``Q(t)``, ``F5(x)`` -> field object."""
    s = selector.strip().replace(" ", "")
    inner, var = s, None
    if s.endswith(")") and "(" in s:
        inner, var = s[:-1].split("(", 1)
        if not var.isidentifier():
            raise ValueError(f"bad rational function variable in {selector!r}")
    if inner == "Q":
        base: Field = QQ
    elif inner.startswith("F") and inner[1:].isdigit():
        base = PrimeField(int(inner[1:]))
    else:
        raise ValueError(f"unknown field selector {selector!r}")
    return RationalFunctionField(base, var) if var else base
