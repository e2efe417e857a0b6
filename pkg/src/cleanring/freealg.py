"""Free noncommutative algebras over exact fields, monomial reduction systems,
normal forms, ambiguity (diamond-lemma) checks and bounded searches in
quotients.

Words are tuples of generator indices; the monomial order is length first,
then lexicographic in the declared alphabet order.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import parsing
from .scalars import Field, QQ, parse_field

Word = tuple


def word_key(w: Word) -> tuple:
    return (len(w), w)


class ResourceError(RuntimeError):
    """A bounded search exceeded its configured size guard."""

    def __init__(self, message: str, dimension: int):
        super().__init__(f"{message} (attempted dimension {dimension})")
        self.dimension = dimension


class FreeAlgebra:
    """F<x_1, ..., x_n> with a fixed alphabet order."""

    def __init__(self, field: Field, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        for n in names:
            if not n.isidentifier():
                raise ValueError(f"bad generator name {n!r}")
        self.field = field
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}

    def __repr__(self) -> str:
        return f"FreeAlgebra({self.field.name}, {' '.join(self.names)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeAlgebra) and (self.field, self.names) == (other.field, other.names)

    def __hash__(self) -> int:
        return hash((self.field, self.names))

    @property
    def zero(self) -> NCPoly:
        return NCPoly(self, {})

    @property
    def one(self) -> NCPoly:
        return NCPoly(self, {(): self.field.one})

    def scalar(self, c) -> NCPoly:
        return NCPoly(self, {(): self.field.coerce(c)})

    def gen(self, name: str) -> NCPoly:
        return NCPoly(self, {(self.index[name],): self.field.one})

    def gens(self) -> list[NCPoly]:
        return [self.gen(n) for n in self.names]

    def monomial(self, word: Word, c=None) -> NCPoly:
        return NCPoly(self, {tuple(word): self.field.one if c is None else self.field.coerce(c)})

    def word(self, text: str) -> Word:
        """``'a*r*a'`` or ``'a r a'`` or ``'a^2*w'`` -> word tuple."""
        p = self.parse(text.replace(" ", "*") if "*" not in text else text)
        if len(p.terms) != 1:
            raise ValueError(f"{text!r} is not a monomial")
        (w, c), = p.terms.items()
        if not self.field.eq(c, self.field.one):
            raise ValueError(f"{text!r} is not a monic monomial")
        return w

    def parse(self, text: str) -> NCPoly:
        return parsing.evaluate(text, _PolyAlgebra(self))

    def fmt_word(self, w: Word) -> str:
        if not w:
            return "1"
        out = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            n = self.names[w[i]]
            out.append(n if j - i == 1 else f"{n}^{j - i}")
            i = j
        return "*".join(out)


class _PolyAlgebra:
    def __init__(self, alg: FreeAlgebra):
        self.alg = alg

    def const(self, n):
        return self.alg.scalar(n)

    def var(self, name):
        if name not in self.alg.index:
            raise ValueError(f"unknown generator {name!r}")
        return self.alg.gen(name)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def div(self, x, y):
        c = y.constant_value()
        if c is None:
            raise ValueError("division only by nonzero scalars")
        return x * self.alg.field.inv(c)

    def pow(self, x, n):
        if n < 0:
            raise ValueError("malformed exponent: negative powers are not allowed")
        return x ** n


class NCPoly:
    """Element of a free algebra: ``{word: coeff}`` with no zero coefficients."""

    __slots__ = ("parent", "terms", "_hash")

    def __init__(self, parent: FreeAlgebra, terms: dict):
        f = parent.field
        self.parent = parent
        self.terms = {w: c for w, c in terms.items() if not f.is_zero(c)}
        self._hash = None

    @property
    def field(self) -> Field:
        return self.parent.field

    def _coerce(self, other) -> NCPoly:
        if isinstance(other, NCPoly):
            if other.parent != self.parent:
                raise ValueError("polynomials from different free algebras")
            return other
        return self.parent.scalar(other)

    def __add__(self, other) -> NCPoly:
        other = self._coerce(other)
        f = self.field
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = f.add(out[w], c) if w in out else c
        return NCPoly(self.parent, out)

    __radd__ = __add__

    def __neg__(self) -> NCPoly:
        f = self.field
        return NCPoly(self.parent, {w: f.neg(c) for w, c in self.terms.items()})

    def __sub__(self, other) -> NCPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> NCPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> NCPoly:
        other = self._coerce(other)
        f = self.field
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = f.mul(c1, c2)
                out[w] = f.add(out[w], c) if w in out else c
        return NCPoly(self.parent, out)

    def __rmul__(self, other) -> NCPoly:
        return self._coerce(other) * self

    def __pow__(self, n: int) -> NCPoly:
        if n < 0:
            raise ValueError("negative power of a free-algebra element")
        out = self.parent.one
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int,)):
            other = self.parent.scalar(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.parent == other.parent and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self):
        """The scalar if this polynomial is a nonzero constant, else None."""
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        if not self.terms:
            return None
        return None

    def constant_term(self):
        return self.terms.get((), self.field.zero)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def support(self) -> list[Word]:
        return sorted(self.terms, key=word_key)

    def homogeneous_part(self, d: int) -> NCPoly:
        return NCPoly(self.parent, {w: c for w, c in self.terms.items() if len(w) == d})

    def leading_word(self) -> Word:
        return max(self.terms, key=word_key)

    def fmt(self) -> str:
        if not self.terms:
            return "0"
        f = self.field
        parts = []
        for w in self.support():
            s = f.fmt(self.terms[w])
            neg = s.startswith("-")
            if neg:
                s = s[1:]
            if not w:
                mono = s
            elif s == "1":
                mono = self.parent.fmt_word(w)
            else:
                mono = f"{s}*{self.parent.fmt_word(w)}"
            if not parts:
                parts.append(("-" if neg else "") + mono)
            else:
                parts.append((" - " if neg else " + ") + mono)
        return "".join(parts)

    __str__ = fmt

    def __repr__(self) -> str:
        return f"NCPoly({self.fmt()})"

    def substitute(self, ring, values: dict):
        """Evaluate in ``ring`` (a ring handle) with generator name -> element."""
        result = ring.zero
        cache: dict = {}
        for w, c in self.terms.items():
            acc = ring.one
            for i, letter in enumerate(w):
                prefix = w[: i + 1]
                if prefix in cache:
                    acc = cache[prefix]
                else:
                    acc = ring.mul(acc, values[self.parent.names[letter]])
                    cache[prefix] = acc
            result = ring.add(result, ring.mul(ring.scalar(c), acc))
        return result


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: NCPoly

    def check(self) -> None:
        k = word_key(self.lhs)
        for w in self.rhs.terms:
            if word_key(w) >= k:
                raise ValueError(
                    f"rule {self.rhs.parent.fmt_word(self.lhs)} -> {self.rhs.fmt()} is not decreasing "
                    f"(term {self.rhs.parent.fmt_word(w)} is not smaller than the left side)")

    def fmt(self) -> str:
        return f"{self.rhs.parent.fmt_word(self.lhs)} -> {self.rhs.fmt()}"


@dataclass
class RewriteStep:
    word: Word
    position: int
    rule: int


class ReductionSystem:
    """Monomial rewrite rules ``lhs -> rhs`` over a free algebra.

    ``normal_form`` uses the fixed strategy: rewrite the largest reducible
    word at its leftmost reducible position with the first matching rule.
    ``rule_order`` and ``rightmost`` produce the alternative strategies used
    by the budgeted searches.
    """

    def __init__(self, algebra: FreeAlgebra, rules: Iterable[Rule],
                 rule_order: Sequence[int] | None = None, rightmost: bool = False):
        self.algebra = algebra
        self.rules = list(rules)
        seen = set()
        for r in self.rules:
            if r.rhs.parent != algebra:
                raise ValueError("rule right side lives in a different algebra")
            r.check()
            if r.lhs in seen:
                raise ValueError(f"duplicate left side {algebra.fmt_word(r.lhs)}")
            if not r.lhs:
                raise ValueError("empty left side")
            seen.add(r.lhs)
        self.rule_order = tuple(range(len(self.rules))) if rule_order is None else tuple(rule_order)
        self.rightmost = rightmost
        self._max_len = max((len(r.lhs) for r in self.rules), default=0)
        self._lhs = {r.lhs: i for i, r in enumerate(self.rules)}
        self._lengths = sorted({len(r.lhs) for r in self.rules})
        self._rank = {ri: k for k, ri in enumerate(self.rule_order)}
        self._nf_cache: dict[Word, dict] = {}

    @classmethod
    def from_strings(cls, algebra: FreeAlgebra, rules: Iterable[tuple[str, str]]) -> ReductionSystem:
        built = []
        for lhs, rhs in rules:
            built.append(Rule(algebra.word(lhs), algebra.parse(rhs)))
        return cls(algebra, built)

    def variant(self, rule_order: Sequence[int] | None = None, rightmost: bool = False) -> ReductionSystem:
        return ReductionSystem(self.algebra, self.rules, rule_order, rightmost)

    def with_rules(self, extra: Iterable[Rule]) -> ReductionSystem:
        return ReductionSystem(self.algebra, list(self.rules) + list(extra))

    def __repr__(self) -> str:
        return f"ReductionSystem({len(self.rules)} rules over {self.algebra!r})"

    # -- matching --------------------------------------------------------

    def find_redex(self, w: Word) -> tuple[int, int] | None:
        """(position, rule index) chosen by this system's strategy, or None."""
        n = len(w)
        positions = range(n - 1, -1, -1) if self.rightmost else range(n)
        lhs = self._lhs
        rank = self._rank
        for i in positions:
            best = None
            for L in self._lengths:
                if i + L > n:
                    break
                ri = lhs.get(w[i:i + L])
                if ri is not None and ri in rank and (best is None or rank[ri] < rank[best]):
                    best = ri
            if best is not None:
                return i, best
        return None

    @property
    def is_monomial(self) -> bool:
        """True when every rule rewrites a word to a scalar multiple of a word."""
        return all(len(r.rhs.terms) <= 1 for r in self.rules)

    def is_reducible(self, w: Word) -> bool:
        n = len(w)
        for i in range(n):
            for L in range(1, min(self._max_len, n - i) + 1):
                if w[i:i + L] in self._lhs:
                    return True
        return False

    def rewrite_at(self, w: Word, position: int, rule: int) -> dict:
        """One rewrite of word ``w``; returns the resulting ``{word: coeff}``."""
        r = self.rules[rule]
        if w[position:position + len(r.lhs)] != r.lhs:
            raise ValueError("rule does not match at the given position")
        u, v = w[:position], w[position + len(r.lhs):]
        return {u + x + v: c for x, c in r.rhs.terms.items()}

    # -- normal forms ----------------------------------------------------

    def word_normal_form(self, w: Word) -> dict:
        cached = self._nf_cache.get(w)
        if cached is not None:
            return cached
        f = self.algebra.field
        # iterative: reduce largest words first, accumulate per-word results
        stack = [w]
        while stack:
            top = stack[-1]
            if top in self._nf_cache:
                stack.pop()
                continue
            redex = self.find_redex(top)
            if redex is None:
                self._nf_cache[top] = {top: f.one}
                stack.pop()
                continue
            image = self.rewrite_at(top, *redex)
            pending = [x for x in image if x not in self._nf_cache]
            if pending:
                stack.extend(pending)
                continue
            out: dict = {}
            for x, c in image.items():
                for y, d in self._nf_cache[x].items():
                    cd = f.mul(c, d)
                    out[y] = f.add(out[y], cd) if y in out else cd
            self._nf_cache[top] = {y: c for y, c in out.items() if not f.is_zero(c)}
            stack.pop()
        return self._nf_cache[w]

    def normal_form(self, p: NCPoly) -> NCPoly:
        f = self.algebra.field
        out: dict = {}
        for w, c in p.terms.items():
            for y, d in self.word_normal_form(w).items():
                cd = f.mul(c, d)
                out[y] = f.add(out[y], cd) if y in out else cd
        return NCPoly(self.algebra, out)

    def normal_form_traced(self, p: NCPoly) -> tuple[NCPoly, list[RewriteStep]]:
        """Same result as :meth:`normal_form`, recording every rewrite."""
        f = self.algebra.field
        terms = dict(p.terms)
        heap = [(-len(w), tuple(-x for x in w), w) for w in terms]
        heapq.heapify(heap)
        done: dict = {}
        steps: list[RewriteStep] = []
        queued = set(terms)
        while heap:
            _, _, w = heapq.heappop(heap)
            queued.discard(w)
            c = terms.pop(w, None)
            if c is None or f.is_zero(c):
                continue
            redex = self.find_redex(w)
            if redex is None:
                done[w] = c
                continue
            steps.append(RewriteStep(w, *redex))
            for x, d in self.rewrite_at(w, *redex).items():
                cd = f.mul(c, d)
                terms[x] = f.add(terms[x], cd) if x in terms else cd
                if x not in queued:
                    queued.add(x)
                    heapq.heappush(heap, (-len(x), tuple(-y for y in x), x))
        return NCPoly(self.algebra, done), steps

    def reduce(self, p: NCPoly | str) -> NCPoly:
        if isinstance(p, str):
            p = self.algebra.parse(p)
        return self.normal_form(p)

    def mul(self, p: NCPoly, q: NCPoly) -> NCPoly:
        return self.normal_form(p * q)

    def normal_words(self, max_len: int, weights: Sequence[int] | None = None,
                     degrees: Iterable[int] | None = None) -> Iterator[Word]:
        """All irreducible words of length <= max_len, in increasing order.

        With ``weights`` (one integer per generator) and ``degrees``, only words
        whose weighted degree lies in ``degrees`` are produced; prefixes that
        cannot reach an allowed degree are pruned.
        """
        n = len(self.algebra.names)
        allowed = None
        if degrees is not None:
            if weights is None:
                raise ValueError("degrees need a grading")
            allowed = set(degrees)
            lo, hi = min(allowed), max(allowed)
            up = max(0, max(weights))
            down = min(0, min(weights))
        layer: list[tuple[Word, int]] = [((), 0)]
        for length in range(max_len + 1):
            layer.sort()
            for w, d in layer:
                if allowed is None or d in allowed:
                    yield w
            if length == max_len:
                break
            left = max_len - length - 1
            nxt = []
            for w, d in layer:
                for x in range(n):
                    cand = w + (x,)
                    if self._suffix_reducible(cand):
                        continue
                    nd = d + (weights[x] if weights is not None else 0)
                    if allowed is not None and (nd + left * up < lo or nd + left * down > hi):
                        continue
                    nxt.append((cand, nd))
            layer = nxt

    def grading(self) -> list[int] | None:
        """Integer generator weights for which every rule is homogeneous.

        Returns a nonzero weight vector (first basis vector of the solution
        space, normalised so that its first nonzero weight is positive), or
        None when only the trivial grading exists.
        """
        from fractions import Fraction
        from math import lcm
        from . import linalg
        from .scalars import QQ

        n = len(self.algebra.names)
        rows = []
        for rule in self.rules:
            lhs = [0] * n
            for x in rule.lhs:
                lhs[x] += 1
            for w in rule.rhs.terms:
                row = list(lhs)
                for x in w:
                    row[x] -= 1
                rows.append([Fraction(c) for c in row])
        basis = linalg.nullspace(QQ, rows) if rows else [[Fraction(int(i == 0)) for i in range(n)]]
        if not basis:
            return None
        vec = basis[0]
        scale = lcm(*(c.denominator for c in vec))
        ints = [int(c * scale) for c in vec]
        first = next(c for c in ints if c)
        return [-c for c in ints] if first < 0 else ints

    def word_degree(self, w: Word, weights: Sequence[int]) -> int:
        return sum(weights[x] for x in w)

    def _suffix_reducible(self, w: Word) -> bool:
        n = len(w)
        for L in range(1, min(self._max_len, n) + 1):
            if w[n - L:] in self._lhs:
                return True
        return False

    def to_text(self) -> str:
        lines = [f"field: {self.algebra.field.name}", f"vars: {' '.join(self.algebra.names)}"]
        lines += [f"rule: {r.fmt()}" for r in self.rules]
        return "\n".join(lines) + "\n"


def parse_expr(text: str, algebra: FreeAlgebra) -> NCPoly:
    return algebra.parse(text)


def normal_form(p: NCPoly, system: ReductionSystem) -> NCPoly:
    return system.normal_form(p)


def parse_system(text: str) -> ReductionSystem:
    """Parse the line-based reduction-system format.

    ::

        field: F2
        vars: a r t w
        rule: a*r*a -> a
    """
    field_ = QQ
    names = None
    raw_rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise parsing.ParseError(f"expected 'key: value', got {line!r}", lineno, 1)
        key = key.strip()
        col = raw.index(":") + 2
        if key == "field":
            try:
                field_ = parse_field(value)
            except ValueError as exc:
                raise parsing.ParseError(str(exc), lineno, col) from exc
        elif key == "vars":
            names = value.split()
        elif key == "rule":
            if "->" not in value:
                raise parsing.ParseError("rule needs '->'", lineno, col)
            lhs, rhs = value.split("->", 1)
            raw_rules.append((lineno, col, lhs.strip(), rhs.strip()))
        else:
            raise parsing.ParseError(f"unknown key {key!r}", lineno, 1)
    if names is None:
        raise parsing.ParseError("missing 'vars:' line", 1, 1)
    alg = FreeAlgebra(field_, names)
    rules = []
    for lineno, col, lhs, rhs in raw_rules:
        try:
            lw = alg.parse(lhs)
            if len(lw.terms) != 1 or not alg.field.eq(next(iter(lw.terms.values())), alg.field.one):
                raise ValueError("rule left side must be a monic monomial")
            rule = Rule(next(iter(lw.terms)), alg.parse(rhs))
            rule.check()
        except parsing.ParseError as exc:
            raise parsing.ParseError(exc.message, lineno, col + exc.column - 1) from exc
        except ValueError as exc:
            raise parsing.ParseError(str(exc), lineno, col) from exc
        rules.append(rule)
    return ReductionSystem(alg, rules)


def load_system(path) -> ReductionSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


# --- ambiguities --------------------------------------------------------

@dataclass(frozen=True)
class Ambiguity:
    kind: str  # 'overlap' or 'inclusion'
    rule_a: int
    rule_b: int
    witness: Word
    pos_a: int
    pos_b: int


@dataclass
class DiamondReport:
    ambiguities: list[Ambiguity]
    unresolved: list[tuple[Ambiguity, NCPoly, NCPoly]]

    @property
    def resolvable(self) -> bool:
        return not self.unresolved


def ambiguities(system: ReductionSystem) -> list[Ambiguity]:
    out = []
    rules = system.rules
    for ia, ra in enumerate(rules):
        A = ra.lhs
        for ib, rb in enumerate(rules):
            B = rb.lhs
            # overlap: proper suffix of A equals proper prefix of B
            for k in range(1, min(len(A), len(B))):
                if A[len(A) - k:] == B[:k]:
                    w = A + B[k:]
                    out.append(Ambiguity("overlap", ia, ib, w, 0, len(A) - k))
            # inclusion: B occurs inside A (B != A)
            if ia != ib and len(B) <= len(A):
                for i in range(len(A) - len(B) + 1):
                    if A[i:i + len(B)] == B:
                        out.append(Ambiguity("inclusion", ia, ib, A, 0, i))
    return out


def check_diamond(system: ReductionSystem) -> DiamondReport:
    amb = ambiguities(system)
    unresolved = []
    alg = system.algebra
    for a in amb:
        left = system.normal_form(NCPoly(alg, system.rewrite_at(a.witness, a.pos_a, a.rule_a)))
        right = system.normal_form(NCPoly(alg, system.rewrite_at(a.witness, a.pos_b, a.rule_b)))
        if left != right:
            unresolved.append((a, left, right))
    return DiamondReport(amb, unresolved)


# --- zero tests and bounded searches -----------------------------------

@dataclass
class ZeroVerdict:
    verdict: str  # 'proved-zero' or 'inconclusive'
    strategy: str
    residue: NCPoly
    attempts: int

    @property
    def proved(self) -> bool:
        return self.verdict == "proved-zero"


def reduce_to_zero(p: NCPoly, system: ReductionSystem, budget: int = 32, seed: int = 0) -> ZeroVerdict:
    """Try to rewrite ``p`` to 0.

    Every strategy is a sequence of valid rewrites, so 'proved-zero' is sound.
    The default strategy runs first; on a stall, alternating strategies are
    chained (each one reduces the residue left by the previous one) for up to
    ``budget`` attempts.  'inconclusive' never asserts p != 0.
    """
    q = system.normal_form(p)
    if q.is_zero():
        return ZeroVerdict("proved-zero", "default", q, 1)
    rng = random.Random(seed)
    n = len(system.rules)
    residue = q
    variants = [system.variant(rightmost=True),
                system.variant(tuple(reversed(range(n)))),
                system.variant(tuple(reversed(range(n))), rightmost=True)]
    for attempt in range(1, budget):
        if attempt <= len(variants):
            v = variants[attempt - 1]
        else:
            order = list(range(n))
            rng.shuffle(order)
            v = system.variant(order, rightmost=rng.random() < 0.5)
        r = system.normal_form(v.normal_form(residue))
        if r.is_zero():
            return ZeroVerdict("proved-zero", f"chained strategies ({attempt + 1})", r, attempt + 1)
        residue = r
    return ZeroVerdict("inconclusive", "budget exhausted", residue, budget)


@dataclass
class InverseSearchResult:
    inverse: NCPoly | None
    support: int
    dimension: int
    max_len: int
    method: str = "exact"


@dataclass(frozen=True)
class SearchSpan:
    """Candidates ``left * m * right`` for normal words m of length <= max_len.

    ``degrees`` keeps only words m of the given degrees under the grading of
    the system.  Missing ``left``/``right`` mean 1.
    """
    max_len: int
    left: NCPoly | None = None
    right: NCPoly | None = None
    degrees: tuple[int, ...] | None = None


class _ModularImage:
    """Normal forms of a monomial system with coefficients reduced mod p.

    Words are byte strings (one byte per generator index) so the rewriting
    runs through :func:`cleanring.kernels.monomial_nf`.
    """

    def __init__(self, system: ReductionSystem, p: int):
        from .scalars import PrimeField
        from . import kernels

        self.p = p
        self.Fp = PrimeField(p)
        self._nf_kernel = kernels.monomial_nf
        self.lhs = tuple(bytes(r.lhs) for r in system.rules)
        self.rhs = []
        self.coef = []
        for r in system.rules:
            if r.rhs.is_zero():
                self.rhs.append(None)
                self.coef.append(0)
            else:
                (w, c), = r.rhs.terms.items()
                self.rhs.append(bytes(w))
                self.coef.append(self.reduce(c))
        self.rhs = tuple(self.rhs)
        self.rank = tuple(system._rank.get(i, len(system.rules)) for i in range(len(system.rules)))
        self.trivial = all(c == 1 for c in self.coef)
        self._cache: dict[bytes, tuple] = {}

    def reduce(self, c) -> int:
        return self.Fp.coerce(c)

    def image(self, poly: NCPoly) -> dict:
        out: dict = {}
        for w, c in poly.terms.items():
            for y, d in self.nf(bytes(w)).items():
                out[y] = (out.get(y, 0) + self.reduce(c) * d) % self.p
        return {y: c for y, c in out.items() if c}

    def nf(self, word: bytes) -> dict:
        hit = self._cache.get(word)
        if hit is None:
            w, applied = self._nf_kernel(word, self.lhs, self.rhs, self.rank)
            if w is None:
                hit = {}
            else:
                c = 1
                if not self.trivial:
                    for i in applied:
                        c = c * self.coef[i] % self.p
                hit = {w: c} if c else {}
            self._cache[word] = hit
        return hit

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        p = self.p
        for a, ca in x.items():
            for b, cb in y.items():
                for w, c in self.nf(a + b).items():
                    out[w] = (out.get(w, 0) + ca * cb * c) % p
        return {w: c for w, c in out.items() if c}


def bounded_inverse_search(u: NCPoly, system: ReductionSystem, max_len: int,
                           max_dimension: int = 200_000, degrees: Iterable[int] | None = None,
                           weights: Sequence[int] | None = None,
                           spans: Sequence[SearchSpan] | None = None) -> InverseSearchResult:
    """Solve u*v = v*u = 1 for v in the span of normal words of length <= max_len.

    ``degrees`` restricts the span to words of those degrees for a grading
    compatible with the rules (``weights``, defaulting to
    :meth:`ReductionSystem.grading`).  ``spans`` replaces the plain word span
    by a union of sandwiched spans (see :class:`SearchSpan`).  Any solution
    found is re-verified exactly, and two-sided inverses are unique, so a
    restricted search can only miss an inverse, never report a wrong one.

    For monomial rules over Q or F_p the columns are built modulo a prime
    through the compiled kernel; over Q the solution is lifted by rational
    reconstruction (``method == "modular"``).  In that mode a negative answer
    over Q means "no solution modulo 2^31 - 1".

    The solution is returned in normal form with its support size; ``inverse``
    is None when no solution exists inside the bounded span.
    """
    from .scalars import PrimeField, Rationals

    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    if spans is None:
        spans = [SearchSpan(max_len, degrees=tuple(degrees) if degrees is not None else None)]
    if any(sp.degrees is not None for sp in spans) and weights is None:
        weights = system.grading()
        if weights is None:
            raise ValueError("the rules admit no nontrivial grading")
    candidates: list[tuple[int, Word]] = []
    for k, sp in enumerate(spans):
        for w in system.normal_words(sp.max_len, weights if sp.degrees is not None else None, sp.degrees):
            candidates.append((k, w))
            if len(candidates) > max_dimension:
                raise ResourceError(f"inverse search span exceeds {max_dimension} candidates",
                                    len(candidates))
    u = system.normal_form(u)
    field = system.algebra.field
    result = None
    if system.is_monomial and isinstance(field, (Rationals, PrimeField)):
        result = _modular_inverse_search(u, system, spans, candidates, max_len)
    if result is None:
        result = _exact_inverse_search(u, system, spans, candidates, max_len)
    return result


def _candidate(system: ReductionSystem, sp: SearchSpan, w: Word) -> NCPoly:
    alg = system.algebra
    m = NCPoly(alg, {w: alg.field.one})
    if sp.left is not None:
        m = sp.left * m
    if sp.right is not None:
        m = m * sp.right
    return system.normal_form(m)


def _finish(u, system, spans, candidates, sol, max_len, method) -> InverseSearchResult | None:
    alg = system.algebra
    v = alg.zero
    for j, c in sol.items():
        k, w = candidates[j]
        v = v + _candidate(system, spans[k], w) * alg.scalar(c)
    v = system.normal_form(v)
    # exact re-verification, independent of the solver
    if system.normal_form(u * v) != alg.one or system.normal_form(v * u) != alg.one:
        return None
    return InverseSearchResult(v, len(v.terms), len(candidates), max_len, method)


def _exact_inverse_search(u, system, spans, candidates, max_len) -> InverseSearchResult:
    from .linalg import solve_sparse

    f = system.algebra.field
    columns = []
    for k, w in candidates:
        c = _candidate(system, spans[k], w)
        left = system.normal_form(u * c)
        right = system.normal_form(c * u)
        col = {("L", x): d for x, d in left.terms.items()}
        col.update({("R", x): d for x, d in right.terms.items()})
        columns.append(col)
    rhs = {("L", ()): f.one, ("R", ()): f.one}
    sol = solve_sparse(f, columns, rhs)
    if sol is None:
        return InverseSearchResult(None, 0, len(candidates), max_len)
    found = _finish(u, system, spans, candidates, sol, max_len, "exact")
    if found is None:
        raise AssertionError("inverse search produced an unverified solution")
    return found


def _modular_inverse_search(u, system, spans, candidates, max_len) -> InverseSearchResult | None:
    from .linalg import MODULUS, _rational_reconstruct, _sparse_eliminate
    from .scalars import PrimeField

    field = system.algebra.field
    p = field.p if isinstance(field, PrimeField) else MODULUS
    img = _ModularImage(system, p)
    u_img = img.image(u)
    sides = [(img.image(sp.left) if sp.left is not None else {b"": 1},
              img.image(sp.right) if sp.right is not None else {b"": 1}) for sp in spans]
    columns = []
    for k, w in candidates:
        left, right = sides[k]
        c = img.mul(img.mul(left, {bytes(w): 1}), right)
        col = {(0, x): d for x, d in img.mul(u_img, c).items()}
        col.update({(1, x): d for x, d in img.mul(c, u_img).items()})
        columns.append(col)
    sol = _sparse_eliminate(img.Fp, columns, {(0, b""): 1, (1, b""): 1})
    if sol is None:
        return InverseSearchResult(None, 0, len(candidates), max_len, "modular")
    if not isinstance(field, PrimeField):
        lifted = {}
        for j, x in sol.items():
            q = _rational_reconstruct(x, p)
            if q is None:
                return None
            lifted[j] = q
        sol = lifted
    return _finish(u, system, spans, candidates, sol, max_len, "modular")


def nilpotent_inverse(a: NCPoly, system: ReductionSystem, nil_bound: int) -> NCPoly:
    """Inverse of 1 + a in the quotient, given a**nil_bound reduces to 0."""
    alg = system.algebra
    a = system.normal_form(a)
    power = alg.one
    terms = alg.zero
    sign = alg.field.one
    for i in range(nil_bound):
        terms = terms + power * sign
        power = system.normal_form(power * a)
        sign = alg.field.neg(sign)
        if power.is_zero():
            return system.normal_form(terms)
    raise ValueError(f"a^{nil_bound} does not reduce to 0; nilpotency bound violated at power {nil_bound}")
