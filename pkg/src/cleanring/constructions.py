"""Constructive recipes that return machine-checked certificates.

Every certificate stores the identities it claims together with their
verdicts, recomputed with the ring handle's own arithmetic after the object
is assembled.  A certificate whose identities do not all hold is never
returned; :class:`CertificateError` is raised instead.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Sequence

from . import linalg, parsing
from .freealg import (FreeAlgebra, NCPoly, ReductionSystem, SearchSpan,
                      bounded_inverse_search, check_diamond, parse_system, reduce_to_zero)
from .matring import (CornerView, MatrixRing, QuotientAlgebra, TaggedEntry, _ScalarAlgebra,
                      tabulate, tagged_ring, DEFAULT_SIZE_CAP)
from .predicates import find_inner_inverses
from .scalars import (Field, LaurentPolynomial, PrimeField, RationalFunctionField,
                      UnsupportedOperation, parse_field)
from .toeplitz import (BILATERAL, UNILATERAL, ToeplitzElement, ToeplitzRing, corner_factorization,
                       enumerate_window_idempotents, zero_line_certificate)


class CertificateError(AssertionError):
    """An identity claimed by a certificate failed re-verification."""


class PreconditionError(ValueError):
    """Input data does not meet the hypotheses of a construction."""


class NotRegularError(PreconditionError):
    def __init__(self, power: int):
        super().__init__(f"a^{power} is not regular")
        self.power = power


class OutOfTierError(ValueError):
    """The input needs a symbol outside the Laurent-polynomial representation."""


def evaluate(ring, text: str, **values):
    """Evaluate an expression such as ``1-r*a+t*r`` in a ring handle."""
    return parsing.evaluate(text, _ScalarAlgebra(ring, values))


def _require(identities: dict[str, bool], what: str) -> None:
    bad = [k for k, ok in identities.items() if not ok]
    if bad:
        raise CertificateError(f"{what}: failed {', '.join(bad)}")


@dataclass
class Certificate:
    """Named identities with their verdicts plus the data they refer to."""
    name: str
    identities: dict[str, bool]
    data: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(self.identities.values())


# --- clean decompositions -----------------------------------------------------------

@dataclass
class CleanCertificate:
    ring: Any
    a: Any
    e: Any
    u: Any
    u_inverse: Any
    identities: dict[str, bool]
    extras: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(self.identities.values())

    def to_json(self) -> dict:
        R = self.ring
        return {"ring": R.name, "a": R.to_json(self.a), "e": R.to_json(self.e), "u": R.to_json(self.u),
                "u_inverse": R.to_json(self.u_inverse), "identities": self.identities}


def clean_certificate(ring, a, e, u, u_inverse=None, condition6: bool = False,
                      extras: dict | None = None) -> CleanCertificate:
    R = ring
    m, eq = R.mul, R.eq
    if u_inverse is None:
        u_inverse = R.inverse(u)
        if u_inverse is None:
            raise CertificateError("u is not a unit")
    ids = {
        "e^2 = e": eq(m(e, e), e),
        "u u^-1 = 1": eq(m(u, u_inverse), R.one),
        "u^-1 u = 1": eq(m(u_inverse, u), R.one),
        "a = e + u": eq(R.add(e, u), a),
    }
    if condition6:
        a2 = m(a, a)
        ids["a u^-1 a = a"] = eq(m(m(a, u_inverse), a), a)
        ids["a^2 u^-2 a^2 = a^2"] = eq(m(m(a2, m(u_inverse, u_inverse)), a2), a2)
    _require(ids, "clean certificate")
    return CleanCertificate(R, a, e, u, u_inverse, ids, dict(extras or {}))


@dataclass
class ZhangPair:
    a: Any
    e: Any
    u: Any
    g: Any
    v: Any
    identities: dict[str, bool]


def zhang_transform(ring, x, y, direction: str = "forward", a=None) -> ZhangPair:
    """Pass between a = e + u and the pair (g, v) with g = gva, 1-g = -(1-g)v(1-a).

    forward: (e, u) -> (g, v) with v = u^-1, g = 1 - u^-1 e u.
    backward: (g, v) -> (e, u) with u = v^-1, e = 1 - v^-1 g v.
    """
    R = ring
    m, sub, one = R.mul, R.sub, R.one
    if direction == "forward":
        e, u = x, y
        if not R.eq(m(e, e), e):
            raise PreconditionError("e is not idempotent")
        v = R.inverse(u)
        if v is None:
            raise PreconditionError("u is not a unit")
        g = sub(one, m(m(v, e), u))
        a = R.add(e, u)
    elif direction == "backward":
        g, v = x, y
        if not R.eq(m(g, g), g):
            raise PreconditionError("g is not idempotent")
        u = R.inverse(v)
        if u is None:
            raise PreconditionError("v is not a unit")
        e = sub(one, m(m(u, g), v))
        if a is None:
            a = R.add(e, u)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    h = sub(one, g)
    ids = {
        "g^2 = g": R.eq(m(g, g), g),
        "e^2 = e": R.eq(m(e, e), e),
        "g = g v a": R.eq(m(m(g, v), a), g),
        "1-g = -(1-g) v (1-a)": R.eq(h, R.neg(m(m(h, v), sub(one, a)))),
        "a = e + u": R.eq(R.add(e, u), a),
        "u v = 1": R.eq(m(u, v), one),
    }
    _require(ids, "zhang transform")
    return ZhangPair(a, e, u, g, v, ids)


def firstcol_assemble(ring, e, a, eps, mu, beta, gamma) -> CleanCertificate:
    """Clean decomposition of a in Re built from zero-column criterion data."""
    from .predicates import firstcol_check
    R = ring
    m, add, sub, neg, one = R.mul, R.add, R.sub, R.neg, R.one
    rep = firstcol_check(R, e, a, eps, mu, beta, gamma)
    if not rep.condition2_parts[0]:
        raise PreconditionError("first equation fails: eps = eps mu alpha + eps beta (tau + gamma alpha)")
    if not rep.condition2_parts[1]:
        raise PreconditionError("second equation fails: e - eps = -(e - eps) mu (e - alpha)")
    alpha, tau = rep.alpha, rep.tau
    f = sub(one, e)
    zeta = sub(e, eps)
    tau_p = sub(add(tau, m(gamma, alpha)), gamma)
    g = add(eps, m(tau_p, eps))
    lower = add(one, m(tau_p, eps))  # [[e,0],[tau' eps, f]]
    middle = sub(one, m(eps, beta))  # [[e, -eps beta],[0, f]]
    corner = m(add(e, m(m(m(eps, beta), tau_p), zeta)), mu)
    last = sub(add(corner, sub(m(m(tau_p, zeta), mu), gamma)), f)  # [[.., 0],[tau' zeta mu - gamma, -f]]
    v = m(m(lower, middle), last)
    vi = R.inverse(v)
    if vi is None:
        raise CertificateError("assembled v is not a unit")
    h = sub(one, g)
    gv = {"g^2 = g": R.eq(m(g, g), g), "g = g v a": R.eq(m(m(g, v), a), g),
          "1-g = -(1-g) v (1-a)": R.eq(h, neg(m(m(h, v), sub(one, a))))}
    _require(gv, "zero-column assembly")
    e_c = sub(one, m(m(vi, g), v))
    witness = {"zeta": zeta, "tau_prime": tau_p, "g": g, "v": v, "factors": (lower, middle, last)}
    cert = clean_certificate(R, a, e_c, vi, v, extras={"witness": witness})
    cert.identities.update(gv)
    return cert


def stable_range_clean(ring, a) -> CleanCertificate:
    """Clean decomposition of a regular a in a finite ring of stable range one.

    With e = ra, search mu in U(eRe) and omega in eRe with e = mu alpha + omega e r f tau,
    then feed eps = e, beta = omega e r f, gamma = 0 into the zero-column assembly.
    """
    R = ring
    m, sub = R.mul, R.sub
    r = inner_inverse(R, a)
    if r is None:
        raise NotRegularError(1)
    e = m(r, a)
    f = sub(R.one, e)
    alpha, tau = m(m(e, a), e), m(m(f, a), e)
    erf = m(m(e, r), f)
    corner = list(dict.fromkeys(m(m(e, x), e) for x in R.elements()))
    for mu in corner:
        if R.inverse(R.add(mu, f)) is None:
            continue
        for omega in corner:
            if R.eq(e, R.add(m(mu, alpha), m(m(omega, erf), tau))):
                return firstcol_assemble(R, e, a, e, mu, m(omega, erf), R.zero)
    raise PreconditionError("no (mu, omega) found; the corner ring lacks stable range one")


# --- the ten-relation construction -------------------------------------------------

TEN_RELATIONS = (
    ("a*r*a", "a"), ("a^2*w*a", "a^2"), ("w*a*w*a", "w*a"), ("t*a*w*a", "t*a"), ("w*r*a", "w"),
    ("r*a*w", "w"), ("t*r*a", "t"), ("r*a*t", "t"), ("w*t", "r*a"), ("t*w", "r*a"),
)

TEN_RELATION_IDEMPOTENT = ("1-r*a+t*r+a*r^2*a-a*r*t*r-a*w*a*w-r*a^2*r+r*a^2*w+a*r^2*a^2*r"
                           "-a*r^2*a^2*w-a*w*a*r^2*a+a*w*a*r^2*a^2*w")

EXPECTED_INVERSE_SUPPORT = 53


def load_data_system(name: str) -> ReductionSystem:
    text = resources.files("cleanring").joinpath("data", name).read_text(encoding="utf-8")
    return parse_system(text)


def ten_relation_system() -> ReductionSystem:
    return load_data_system("ten_relations.sys")


@dataclass
class TenRelationCertificate:
    ring: Any
    a: Any
    r: Any
    t: Any
    w: Any
    relations: tuple[bool, ...]

    @property
    def verified(self) -> bool:
        return all(self.relations)


def ten_relation_certificate(ring, a, r, t, w) -> TenRelationCertificate:
    vals = {"a": a, "r": r, "t": t, "w": w}
    bits = tuple(ring.eq(evaluate(ring, lhs, **vals), evaluate(ring, rhs, **vals)) for lhs, rhs in TEN_RELATIONS)
    return TenRelationCertificate(ring, a, r, t, w, bits)


def symbolic_ten_relation_certificate() -> TenRelationCertificate:
    Q = QuotientAlgebra(ten_relation_system(), "ten-relation quotient")
    return ten_relation_certificate(Q, *(Q.gen(x) for x in "artw"))


def graded_spans(system: ReductionSystem, e: NCPoly) -> list[SearchSpan]:
    """Search spans for the inverse of a - e in the ten-relation quotient.

    The degree -1 part of the inverse is killed by e on both sides and the
    degree 0 part by a, so candidates (1-e) m (1-e) and (1-ra) m (1-ar) with
    m of the right degree suffice; the answer is re-verified exactly.
    """
    alg = system.algebra
    f = system.normal_form(alg.one - e)
    left0 = system.normal_form(alg.one - alg.parse("r*a"))
    right0 = system.normal_form(alg.one - alg.parse("a*r"))
    return [SearchSpan(7, f, f, (-1,)), SearchSpan(8, left0, right0, (0,))]


def corr_assemble(cert: TenRelationCertificate, max_len: int = 8, spans: list | None = None,
                  max_dimension: int = 200_000) -> CleanCertificate:
    """Evaluate the twelve-term idempotent e and certify a = e + (a - e) with
    condition (6)."""
    for i, ok in enumerate(cert.relations, start=1):
        if not ok:
            lhs, rhs = TEN_RELATIONS[i - 1]
            raise PreconditionError(f"relation ({i}) {lhs} = {rhs} fails")
    R = cert.ring
    vals = {"a": cert.a, "r": cert.r, "t": cert.t, "w": cert.w}
    e = evaluate(R, TEN_RELATION_IDEMPOTENT, **vals)
    u = R.sub(cert.a, e)
    extras: dict = {}
    if isinstance(R, QuotientAlgebra):
        S = R.system
        zero = reduce_to_zero(e * e - e, S)
        extras["idempotent_reduction"] = zero.strategy
        if not zero.proved:
            raise CertificateError("e^2 - e did not reduce to zero")
        if spans is None:
            spans = graded_spans(S, e)
        res = bounded_inverse_search(u, S, max_len, max_dimension=max_dimension, spans=spans)
        if res.inverse is None:
            raise CertificateError(f"no inverse of a - e within the search span (dimension {res.dimension})")
        u_inv = res.inverse
        extras.update({"inverse_support": len(u_inv.terms), "expected_support": EXPECTED_INVERSE_SUPPORT,
                       "search_dimension": res.dimension, "search_method": res.method,
                       "inverse_degree": u_inv.degree()})
    else:
        u_inv = R.inverse(u)
        if u_inv is None:
            raise CertificateError("a - e is not a unit")
    return clean_certificate(R, cert.a, e, u, u_inv, condition6=True, extras=extras)


# --- power inner inverses -----------------------------------------------------------

@dataclass
class PowerInverseCertificate:
    a: Any
    w: Any
    n: int
    grid: dict  # (i, j) -> (left identity, right identity)
    diagonal: dict  # i -> a^i w^i a^i = a^i
    unit: bool
    r_unit: bool
    mode: str

    @property
    def verified(self) -> bool:
        return all(l and r for l, r in self.grid.values()) and all(self.diagonal.values())


def _linear_algebra_ring(ring) -> bool:
    if not (isinstance(ring, MatrixRing) and isinstance(ring.base, Field)):
        return False
    return not ring.is_finite or ring.size() > DEFAULT_SIZE_CAP


def inner_inverse(ring, x, prefer_unit: bool = False):
    """One inner inverse of x (a unit one first when asked), or None.

    In a corner view an inner inverse s of x taken in the ambient ring gives
    e s e, an inner inverse inside the corner.
    """
    if isinstance(ring, CornerView):
        s = inner_inverse(ring.ambient, x)
        if s is None:
            return None
        r = ring.inject(s)
        return r if ring.eq(ring.mul(ring.mul(x, r), x), x) else None
    if prefer_unit:
        found = find_inner_inverses(x, ring, units_only=True, first=True)
        if found:
            return found[0]
    found = find_inner_inverses(x, ring, first=True)
    return found[0] if found else None


def _power_w(ring, a, n: int, prefer_unit: bool):
    r = inner_inverse(ring, a, prefer_unit)
    if r is None:
        raise NotRegularError(1)
    if n == 1:
        return r, r
    m, add, sub, one = ring.mul, ring.add, ring.sub, ring.one
    e = m(r, a)
    f = sub(one, e)
    ep = m(a, r)
    fp = sub(one, ep)
    v, _ = _power_w(CornerView(ring, e), m(e, a), n - 1, False)
    vp, _ = _power_w(CornerView(ring, ep), m(a, ep), n - 1, False)
    left = add(one, m(m(m(f, a), v), e))
    right = add(one, m(m(m(ep, vp), a), fp))
    return m(m(left, r), right), r


CLOSED_FORM_W = ("x1 + a*x2*a*x1 + x1*a*x2*a - x1*a^2*x2*a*x1 - x1*a*x2*a^2*x1 + a*x2*a*x2*a"
                 " - a*x2*a*x2*a^2*x1 - x1*a^2*x2*a*x2*a + x1*a^2*x2*a*x2*a^2*x1")


def power_grid(ring, a, w, n: int) -> tuple[dict, dict]:
    m, eq = ring.mul, ring.eq
    ap = [ring.one]
    wp = [ring.one]
    for _ in range(n):
        ap.append(m(ap[-1], a))
        wp.append(m(wp[-1], w))
    grid = {}
    for j in range(1, n + 1):
        for i in range(1, j + 1):
            left = eq(m(m(ap[i], wp[j]), ap[j]), m(wp[j - i], ap[j]))
            right = eq(m(m(ap[j], wp[j]), ap[i]), m(ap[j], wp[j - i]))
            grid[(i, j)] = (left, right)
    diag = {i: eq(m(m(ap[i], wp[i]), ap[i]), ap[i]) for i in range(1, n + 1)}
    return grid, diag


def powerreg_build(a, ring, n: int, mode: str = "recursive", x1=None, x2=None,
                   prefer_unit: bool = True) -> PowerInverseCertificate:
    """An element w with a^i w^j a^j = w^(j-i) a^j and a^j w^j a^i = a^j w^(j-i)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    R = ring
    if mode == "recursive":
        p = a
        for k in range(1, n + 1):
            if inner_inverse(R, p) is None:
                raise NotRegularError(k)
            p = R.mul(p, a)
        w, r = _power_w(R, a, n, prefer_unit)
        r_unit = _is_unit(R, r)
    elif mode == "closed2":
        if n != 2 or x1 is None or x2 is None:
            raise PreconditionError("closed2 needs n = 2 and both x1 and x2")
        a2 = R.mul(a, a)
        if not R.eq(R.mul(R.mul(a, x1), a), a):
            raise PreconditionError("a x1 a != a")
        if not R.eq(R.mul(R.mul(a2, x2), a2), a2):
            raise PreconditionError("a^2 x2 a^2 != a^2")
        w = evaluate(R, CLOSED_FORM_W, a=a, x1=x1, x2=x2)
        r_unit = _is_unit(R, x1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    grid, diag = power_grid(R, a, w, n)
    cert = PowerInverseCertificate(a, w, n, grid, diag, _is_unit(R, w), r_unit, mode)
    if not cert.verified:
        bad = [k for k, v in grid.items() if not all(v)]
        raise CertificateError(f"power grid fails at (i, j) in {bad}")
    if mode == "recursive" and r_unit and not cert.unit:
        raise CertificateError("w should be a unit when r is")
    return cert


def _is_unit(ring, x) -> bool:
    try:
        return ring.inverse(x) is not None
    except UnsupportedOperation:
        return False


def closed_form_symbolic(field_: Field | str = "Q") -> Certificate:
    """Check the nine-term w under {a x1 a -> a, a^2 x2 a^2 -> a^2} by rewriting."""
    F = parse_field(field_) if isinstance(field_, str) else field_
    alg = FreeAlgebra(F, ["a", "x1", "x2"])
    S = ReductionSystem.from_strings(alg, [("a*x1*a", "a"), ("a^2*x2*a^2", "a^2")])
    diamond = check_diamond(S)
    a = alg.gen("a")
    w = S.normal_form(alg.parse(CLOSED_FORM_W))
    mul = S.mul
    a2 = mul(a, a)
    w2 = mul(w, w)
    checks = {
        "a w a - a": reduce_to_zero(mul(mul(a, w), a) - a, S),
        "a^2 w^2 a^2 - a^2": reduce_to_zero(mul(mul(a2, w2), a2) - a2, S),
        "a w^2 a^2 - w a^2": reduce_to_zero(mul(mul(a, w2), a2) - mul(w, a2), S),
        "a^2 w^2 a - a^2 w": reduce_to_zero(mul(mul(a2, w2), a) - mul(a2, w), S),
    }
    ids = {k: v.proved for k, v in checks.items()}
    ids["ambiguities resolvable"] = diamond.resolvable
    return Certificate("closed-form power inverse", ids, {"w": w})


# --- degree counterexample ------------------------------------------------------------

def powerreg_degree_counterexample(k_max: int, p: int = 5) -> Certificate:
    """a = diag(1,0), r = [[1,1],[x,x^2]] over F_p(x): ara = a but a^k r^k a^k != a^k."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    F = RationalFunctionField(PrimeField(p), "x")
    M = MatrixRing(F, 2)
    x = F.gen
    a = M.make([[1, 0], [0, 0]])
    r = M.make([[F.one, F.one], [x, F.mul(x, x)]])
    ids = {"a r a = a": M.eq(M.mul(M.mul(a, r), a), a), "r unit": M.inverse(r) is not None}
    degrees = {}
    rk = r
    for k in range(2, k_max + 1):
        rk = M.mul(rk, r)
        got = tuple(rk[i, j].degree() for i in range(2) for j in range(2))
        expected = (2 * k - 3, 2 * k - 2, 2 * k - 1, 2 * k)
        polys = all(rk[i, j].is_polynomial() for i in range(2) for j in range(2))
        degrees[k] = got
        ids[f"k={k} degrees"] = polys and got == expected
        ak = a  # a is idempotent
        ids[f"k={k} a^k r^k a^k != a^k"] = not M.eq(M.mul(M.mul(ak, rk), ak), ak)
    _require(ids, "degree counterexample")
    return Certificate("degree counterexample", ids, {"degrees": degrees, "field": F.name})


# --- nilpotent, annihilator and commuting-corner formulas --------------------------------

def _nilpotent_index(ring, x, bound: int) -> int | None:
    p = x
    for k in range(1, bound + 1):
        if ring.is_zero(p):
            return k
        p = ring.mul(p, x)
    return None


def _one_plus_inverse(ring, x, index: int):
    """(1 + x)^-1 = sum (-x)^k for nilpotent x."""
    acc = ring.zero
    p = ring.one
    for k in range(index):
        acc = ring.add(acc, p if k % 2 == 0 else ring.neg(p))
        p = ring.mul(p, x)
    return acc


def nilpotent_unit(ring, a, b, bound: int = 16) -> Certificate:
    """u = b + (1+a)^-1 (1-ab) for nilpotent a, b with aba = a."""
    R = ring
    m, add, sub, one = R.mul, R.add, R.sub, R.one
    na, nb = _nilpotent_index(R, a, bound), _nilpotent_index(R, b, bound)
    if na is None:
        raise PreconditionError(f"a is not nilpotent within {bound} powers")
    if nb is None:
        raise PreconditionError(f"b is not nilpotent within {bound} powers")
    if not R.eq(m(m(a, b), a), a):
        raise PreconditionError("aba != a")
    inv_1a = _one_plus_inverse(R, a, na)
    inv_1b = _one_plus_inverse(R, b, nb)
    u = add(b, m(inv_1a, sub(one, m(a, b))))
    u_inv = m(inv_1b, add(one, a))
    ids = {
        "(1+a)(1+a)^-1 = 1": R.eq(m(add(one, a), inv_1a), one),
        "a u a = a": R.eq(m(m(a, u), a), a),
        "u = (1+a)^-1 (1+b)": R.eq(u, m(inv_1a, add(one, b))),
        "u u^-1 = 1": R.eq(m(u, u_inv), one),
        "u^-1 u = 1": R.eq(m(u_inv, u), one),
    }
    _require(ids, "nilpotent unit")
    return Certificate("nilpotent unit inner inverse", ids, {"u": u, "u_inverse": u_inv})


def nilpotent_symbolic(field_: Field | str = "Q") -> Certificate:
    """The same identities by rewriting under {aba -> a, a^3 -> 0, b^3 -> 0}."""
    F = parse_field(field_) if isinstance(field_, str) else field_
    alg = FreeAlgebra(F, ["a", "b"])
    S = ReductionSystem.from_strings(alg, [("a*b*a", "a"), ("a^3", "0"), ("b^3", "0")])
    P = alg.parse
    u = S.normal_form(P("b + (1 - a + a^2)*(1 - a*b)"))
    u_inv = S.normal_form(P("(1 - b + b^2)*(1 + a)"))
    mul = S.mul
    a = alg.gen("a")
    checks = {
        "u u^-1 - 1": reduce_to_zero(mul(u, u_inv) - alg.one, S),
        "u^-1 u - 1": reduce_to_zero(mul(u_inv, u) - alg.one, S),
        "a u a - a": reduce_to_zero(mul(mul(a, u), a) - a, S),
        "u - (1+a)^-1 (1+b)": reduce_to_zero(u - P("(1 - a + a^2)*(1 + b)"), S),
    }
    ids = {k: v.proved for k, v in checks.items()}
    ids["ambiguities resolvable"] = check_diamond(S).resolvable
    return Certificate("nilpotent unit inner inverse (symbolic)", ids, {"u": u, "u_inverse": u_inv})


def annihilators_stabilize(ring, a, n: int) -> bool:
    """ann_r(a^(n-1)) = ann_r(a^n)."""
    R = ring
    lo = R.pow(a, n - 1)
    hi = R.pow(a, n)
    if isinstance(R, MatrixRing) and isinstance(R.base, Field):
        return linalg.rank(R.base, lo.tolist()) == linalg.rank(R.base, hi.tolist())
    if getattr(R, "is_finite", False):
        els = list(R.elements())
        return {x for x in els if R.is_zero(R.mul(lo, x))} == {x for x in els if R.is_zero(R.mul(hi, x))}
    raise UnsupportedOperation(f"cannot compare annihilators in {R.name}")


def annihilator_powers(ring, a, n: int, bound: int | None = None) -> Certificate:
    """With stabilizing annihilators, one w works for all powers."""
    if not annihilators_stabilize(ring, a, n):
        raise PreconditionError(f"ann_r(a^{n - 1}) != ann_r(a^{n})")
    bound = 2 * n if bound is None else bound
    cert = powerreg_build(a, ring, n)
    R = ring
    ids = {}
    ak, wk = R.one, R.one
    for k in range(1, bound + 1):
        ak, wk = R.mul(ak, a), R.mul(wk, cert.w)
        ids[f"a^{k} w^{k} a^{k} = a^{k}"] = R.eq(R.mul(R.mul(ak, wk), ak), ak)
    _require(ids, "annihilator powers")
    return Certificate("stable annihilator power inverse", ids, {"w": cert.w, "n": n})


def commuting_corner_powers(ring, e, u, bound: int = 5) -> Certificate:
    """a = eu with eue = ue: u^-k is an inner inverse of a^k."""
    R = ring
    m = R.mul
    if not R.eq(m(e, e), e):
        raise PreconditionError("e is not idempotent")
    ui = R.inverse(u)
    if ui is None:
        raise PreconditionError("u is not a unit")
    if not R.eq(m(m(e, u), e), m(u, e)):
        raise PreconditionError("eue != ue")
    a = m(e, u)
    ids = {}
    ak, uik = R.one, R.one
    for k in range(1, bound + 1):
        ak, uik = m(ak, a), m(uik, ui)
        ids[f"a^{k} u^-{k} a^{k} = a^{k}"] = R.eq(m(m(ak, uik), ak), ak)
    _require(ids, "commuting corner powers")
    return Certificate("commuting corner power inverse", ids, {"a": a})


def commuting_corner_pairs(ring) -> list[tuple]:
    """All (e, u) with e idempotent, u a unit and eue = ue (by enumeration)."""
    t = tabulate(ring)
    m = t.mul
    out = []
    for e in t.idempotents():
        for u in t.units():
            if m(m(e, u), e) == m(u, e):
                out.append((t.label(e), t.label(u)))
    return out


def nilpotent_unit_formulas(case: str, ring=None, **inputs) -> Certificate:
    if case == "nilpotent":
        return nilpotent_unit(ring, inputs["a"], inputs["b"], inputs.get("bound", 16))
    if case == "symbolic":
        return nilpotent_symbolic(inputs.get("field", "Q"))
    if case == "annihilator":
        return annihilator_powers(ring, inputs["a"], inputs["n"], inputs.get("bound"))
    if case == "lamgift":
        return commuting_corner_powers(ring, inputs["e"], inputs["u"], inputs.get("bound", 5))
    raise ValueError(f"unknown case {case!r}")


# --- the bilateral ring ---------------------------------------------------------------

def witness_element(field_: Field | str = "F2") -> ToeplitzElement:
    """Ones on the subdiagonal except in row 0, plus a one at (-1, -1)."""
    R = ToeplitzRing(BILATERAL, field_)
    return R.element({-1: 1}, {(-1, -1): 1, (0, -1): -1})


@dataclass
class WitnessReport:
    radius: int
    capably: bool
    candidates: int
    matches: list  # (E, line) with line 'row 0' or 'column -1'
    all_certified: bool


def bergman_witness(radius: int = 2, field_: Field | str = "F2", capably: bool = False) -> WitnessReport:
    """Every windowed idempotent E with AE = EA (or AE = EAE) leaves A - E
    with a zero 0th row or a zero (-1)th column."""
    A = witness_element(field_)
    R = A.ring
    matches = []
    count = 0
    ok = True
    for E in enumerate_window_idempotents(R, radius, (0, 1)):
        count += 1
        AE = A * E
        if capably:
            hit = AE == E * A * E
        else:
            hit = AE == E * A
        if not hit:
            continue
        D = A - E
        if E.symbol.is_zero():
            line, fired = "row 0", zero_line_certificate(D, "row", 0)
        else:
            line, fired = "column -1", zero_line_certificate(D, "column", -1)
        ok = ok and fired
        matches.append((E, line if fired else None))
    return WitnessReport(radius, capably, count, matches, ok)


@dataclass
class BergmanUnitCertificate:
    A: ToeplitzElement
    U: ToeplitzElement
    U_inverse: ToeplitzElement
    case: str
    identities: dict[str, bool]

    @property
    def verified(self) -> bool:
        return all(self.identities.values())


def _unit_inner(F: Field, X: list[list]) -> tuple[list[list], list[list]]:
    U0 = linalg.unit_inner_inverse(F, X)
    U0i = linalg.inverse(F, U0)
    if U0i is None or linalg.matmul(F, linalg.matmul(F, X, U0), X) != [list(r) for r in X]:
        raise CertificateError("finite unit inner inverse failed")
    return U0, U0i


def bergman_unit(A: ToeplitzElement) -> BergmanUnitCertificate:
    """A unit U with AUA = A for a zero-symbol or monomial-symbol element."""
    R = A.ring
    if R.model != BILATERAL:
        raise ValueError("the unit construction is for the bilateral model")
    sym = A.symbol
    if sym.is_zero():
        U, Ui = _unit_zero_symbol(A)
        case = "zero symbol"
    elif sym.is_monomial():
        U, Ui = _unit_monomial_symbol(A)
        case = "monomial symbol"
    else:
        raise OutOfTierError(f"symbol {sym.fmt()} is not a monomial; its inverse has an infinite expansion")
    ids = {"A U A = A": A * U * A == A, "U U^-1 = 1": U * Ui == R.one, "U^-1 U = 1": Ui * U == R.one}
    _require(ids, "unit inner inverse")
    return BergmanUnitCertificate(A, U, Ui, case, ids)


def _unit_zero_symbol(A):
    R = A.ring
    F = R.field
    fac = corner_factorization(A)
    c, m, n = fac.c, fac.m, fac.n
    U0, U0i = _unit_inner(F, fac.X0)
    k = m - c - n
    U = R.from_entries({k: 1}, {(n + i, m - c + j): U0[i][j] for i in range(c) for j in range(c)})
    Ui = R.from_entries({-k: 1}, {(m - c + i, n + j): U0i[i][j] for i in range(c) for j in range(c)})
    return U, Ui


def _unit_monomial_symbol(A):
    R = A.ring
    F = R.field
    (k0, lam), = A.symbol.coeffs.items()
    dev = A.dev
    m = max(i for i, _ in dev) + 1 if dev else 0
    n = min(j for _, j in dev) if dev else 0
    if m + k0 <= n:
        m = n - k0 + 1
    rows2 = list(range(n - k0, m))  # rows of X0
    cols2 = list(range(n, m + k0))  # columns of X0
    top = list(range(min([i for i, _ in dev] + [n - k0]), n - k0))
    right = list(range(m + k0, max([j for _, j in dev] + [m + k0 - 1]) + 1))
    X0 = [[A.entry(i, j) for j in cols2] for i in rows2]
    Y = [[A.entry(i, j) for j in cols2] for i in top]
    Z = [[A.entry(i, j) for j in right] for i in rows2]
    W = [[A.entry(i, j) for j in right] for i in top]
    U0, U0i = _unit_inner(F, X0)
    li = F.inv(lam)
    li2 = F.mul(li, li)
    mm = lambda P, Q: linalg.matmul(F, P, Q) if P and Q and Q[0] else [[] for _ in P]
    YU0 = mm(Y, U0)
    U0Z = mm(U0, Z)
    YU0Z = mm(YU0, Z)
    dev_u: dict = {}
    for a, i in enumerate(top):
        for b, c in enumerate(rows2):
            dev_u[(i + k0, c)] = F.neg(F.mul(li, YU0[a][b]))
        for b, col in enumerate(right):
            dev_u[(i + k0, col - k0)] = F.mul(li2, F.sub(YU0Z[a][b], W[a][b]))
    for a, r in enumerate(cols2):
        for b, c in enumerate(rows2):
            dev_u[(r, c)] = F.sub(U0[a][b], li if c == r - k0 else F.zero)
        for b, col in enumerate(right):
            dev_u[(r, col - k0)] = F.neg(F.mul(li, U0Z[a][b]))
    U = R.element({-k0: li}, dev_u)
    block = {(i, j) for i in rows2 for j in cols2}
    entries = {(i, j): A.entry(i, j) for (i, j) in dev if (i, j) not in block}
    entries.update({(i, j): U0i[a][b] for a, i in enumerate(rows2) for b, j in enumerate(cols2)})
    Ui = R.from_entries({k0: lam}, entries)
    return U, Ui


def random_tier1_element(rng: random.Random, field_: Field | str = "F3", box: int = 3,
                         terms: int = 4) -> ToeplitzElement:
    """A bilateral element with zero or monomial symbol and a small random deviation."""
    R = ToeplitzRing(BILATERAL, field_)
    F = R.field
    if rng.random() < 0.4:
        sym: dict = {}
    else:
        lam = F.zero
        while F.is_zero(lam):
            lam = F.random_element(rng)
        sym = {rng.randint(-2, 2): lam}
    dev = {(rng.randint(-box, box), rng.randint(-box, box)): F.random_element(rng)
           for _ in range(rng.randint(0, terms))}
    return R.element(sym, dev)


def bergman_suite(task: str, **params):
    if task == "witness":
        return bergman_witness(params.get("radius", 2), params.get("field", "F2"), params.get("capably", False))
    if task == "unit":
        return bergman_unit(params["A"])
    raise ValueError(f"unknown task {task!r}")


# --- example rings ----------------------------------------------------------------------

def graded_idempotents(system: ReductionSystem, degree_bound: int) -> list[NCPoly]:
    """All idempotents of degree <= bound in a quotient by homogeneous monomial rules.

    Writing e = e_0 + e_1 + ... by length, e_0 is a scalar idempotent and the
    length-k part of e^2 = e is linear in e_k with coefficient 2 e_0 - 1 = +-1,
    so each e_k is forced; the candidates are then checked exactly.
    """
    alg = system.algebra
    F = alg.field
    out = []
    for c0 in (F.zero, F.one):
        parts = [alg.scalar(c0)]
        scale = F.inv(F.sub(F.add(c0, c0), F.one))
        for k in range(1, degree_bound + 1):
            acc = alg.zero
            for i in range(1, k):
                acc = acc + system.mul(parts[i], parts[k - i])
            acc = system.normal_form(acc).homogeneous_part(k)
            parts.append(acc * F.neg(scale))
        e = alg.zero
        for p in parts:
            e = e + p
        e = system.normal_form(e)
        if e.degree() <= degree_bound and system.mul(e, e) == e:
            out.append(e)
    return out


def reg_nilp_certificate(field_: Field | str = "F2", degree_bound: int = 6, samples: int = 20,
                         seed: int = 0) -> Certificate:
    """The square-zero-x example: A = [[x,0],[1,0]] with inner inverse [[y,1-yx],[0,0]]."""
    S = tagged_ring(field_)
    Rb = S.base
    F = S.field
    x, y = Rb.gen("x"), Rb.gen("y")
    one, zero = Rb.one, Rb.zero
    g = S.g
    A = S.make([[TaggedEntry.full(x), TaggedEntry.cofactor(zero)],
                [TaggedEntry.full(one), TaggedEntry.scalar_plus(0, zero)]])
    inner = S.make([[TaggedEntry.full(y), TaggedEntry.cofactor(one)],
                    [TaggedEntry.full(zero), TaggedEntry.scalar_plus(0, zero)]])
    ids = {"A^3 = 0": S.is_zero(S.pow(A, 3)), "A^2 != 0": not S.is_zero(S.pow(A, 2)),
           "A R A = A": S.eq(S.mul(S.mul(A, inner), A), A),
           "inner inverse entry (1,2) = 1 - yx": Rb.eq(S.to_matrix(inner)[0, 1], g)}
    system = Rb.system
    alg = system.algebra
    rng = random.Random(seed)
    ok = True
    for _ in range(samples):
        mu = F.zero
        while F.is_zero(mu):
            mu = F.random_element(rng)
        # n = c x + x q x squares to zero
        nil = Rb.add(Rb.mul(alg.scalar(F.random_element(rng)), x), Rb.mul(Rb.mul(x, Rb.random_element(rng)), x))
        u = Rb.add(alg.scalar(mu), nil)
        inv = Rb.sub(alg.scalar(F.inv(mu)), Rb.mul(alg.scalar(F.inv(F.mul(mu, mu))), nil))
        ok = ok and Rb.eq(Rb.mul(u, inv), one) and Rb.eq(Rb.mul(inv, u), one)
    ids["(mu + n)^-1 = mu^-1 - mu^-2 n for n in Fx + xRx"] = ok
    res = bounded_inverse_search(system.normal_form(alg.parse("1 - y*x")), system, degree_bound)
    ids[f"no inverse of 1 - yx up to degree {degree_bound}"] = res.inverse is None
    idem = graded_idempotents(system, degree_bound)
    ids[f"only trivial idempotents up to degree {degree_bound}"] = sorted(p.fmt() for p in idem) == ["0", "1"]
    _require(ids, "square-zero example")
    return Certificate("regular nilpotent, not unit-regular", ids,
                       {"A": A, "inner": inner, "search_dimension": res.dimension})


def _in_ideal(X: ToeplitzElement) -> bool:
    return X.symbol.is_zero()


def reg_power_not_clean_certificate(k_max: int = 10, field_: Field | str = "F2") -> Certificate:
    """a = diag(alpha, 0) over the unilateral ring with the unit w = [[alpha',0],[sigma,alpha]]."""
    U = ToeplitzRing(UNILATERAL, field_)
    alpha = U.shift_down()
    alpha_p = U.shift_up()
    sigma = U.matrix_unit(1, 1)
    M = MatrixRing(U, 2)
    a = M.make([[alpha, U.zero], [U.zero, U.zero]])
    w = M.make([[alpha_p, U.zero], [sigma, alpha]])
    w_p = M.make([[alpha, sigma], [U.zero, alpha_p]])
    proj = M.make([[U.one, U.zero], [U.zero, U.zero]])
    ids = {"alpha' alpha = 1": alpha_p * alpha == U.one,
           "alpha alpha' = 1 - sigma": alpha * alpha_p == U.one - sigma,
           "w w' = 1": M.mul(w, w_p) == M.one, "w' w = 1": M.mul(w_p, w) == M.one,
           "off-diagonal entries in the ideal": all(_in_ideal(X[i, j]) for X in (a, w, w_p)
                                                      for i, j in ((0, 1), (1, 0)))}
    ak, wk = M.one, M.one
    for k in range(1, k_max + 1):
        ak, wk = M.mul(ak, a), M.mul(wk, w)
        wa = M.mul(wk, ak)
        ids[f"w^{k} a^{k} = diag(1,0)"] = wa == proj
        ids[f"a^{k} w^{k} a^{k} = a^{k}"] = M.mul(ak, wa) == ak
    _require(ids, "power inverse example")
    return Certificate("power inner inverse without cleanness", ids, {"a": a, "w": w, "w_prime": w_p})


def final_example_certificate(p: LaurentPolynomial | dict | str = "x^2", n: int = 2,
                              field_: Field | str = "F2") -> Certificate:
    """z = diag(p(alpha), 0, ...) with v = [[beta',0],[1-beta beta',beta]] satisfies zvz = z."""
    U = ToeplitzRing(UNILATERAL, field_)
    F = U.field
    if isinstance(p, str):
        from .scalars import parse_laurent
        p = parse_laurent(p, F, "x")
    elif isinstance(p, dict):
        p = LaurentPolynomial(F, {k: F.coerce(c) for k, c in p.items()})
    if not p.is_monomial() or p.valuation() < 0:
        raise OutOfTierError(f"p = {p.fmt('x')} is not a monomial c x^k; its left inverse needs an infinite symbol")
    (k, c), = p.coeffs.items()
    beta = U.element({-k: c})  # p(alpha) with alpha of symbol t^-1
    beta_p = U.element({k: F.inv(c)})
    if n < 2:
        raise ValueError("n must be at least 2")
    M = MatrixRing(U, n)
    Z = U.zero
    I = U.one

    def block(top):
        rows = [[Z] * n for _ in range(n)]
        for i in range(2):
            for j in range(2):
                rows[i][j] = top[i][j]
        for i in range(2, n):
            rows[i][i] = I
        return M.make(rows)

    z_rows = [[Z] * n for _ in range(n)]
    z_rows[0][0] = beta
    z = M.make(z_rows)
    proj = I - beta * beta_p
    v = block([[beta_p, Z], [proj, beta]])
    v_inv = block([[beta, proj], [Z, beta_p]])
    ids = {"beta' beta = 1": beta_p * beta == I, "z v z = z": M.mul(M.mul(z, v), z) == z,
           "v v^-1 = 1": M.mul(v, v_inv) == M.one, "v^-1 v = 1": M.mul(v_inv, v) == M.one,
           "off-diagonal entries in the ideal": all(_in_ideal(X[i, j]) for X in (v, v_inv)
                                                      for i in range(n) for j in range(n) if i != j)}
    _require(ids, "polynomial unit-regularity example")
    return Certificate("unit-regular polynomial in a non-clean element", ids, {"z": z, "v": v})


def example_rings_suite(task: str, **params) -> Certificate:
    if task == "regnilp":
        return reg_nilp_certificate(params.get("field", "F2"), params.get("degree_bound", 6))
    if task == "regpower":
        return reg_power_not_clean_certificate(params.get("k_max", 10), params.get("field", "F2"))
    if task == "final":
        return final_example_certificate(params.get("p", "x^2"), params.get("n", 2), params.get("field", "F2"))
    raise ValueError(f"unknown task {task!r}")


# --- rewriting examples -------------------------------------------------------------------

def power_system(I: Sequence[int], unit_variant: bool = False, field_: Field | str = "Q") -> ReductionSystem:
    """{a^i x_i a^i -> a^i : i in I}, optionally with x_i y_i = y_i x_i = 1."""
    F = parse_field(field_) if isinstance(field_, str) else field_
    I = sorted(set(I))
    names = ["a"] + [f"x{i}" for i in I] + ([f"y{i}" for i in I] if unit_variant else [])
    alg = FreeAlgebra(F, names)
    rules = [(f"a^{i}*x{i}*a^{i}", f"a^{i}") for i in I]
    if unit_variant:
        for i in I:
            rules += [(f"x{i}*y{i}", "1"), (f"y{i}*x{i}", "1")]
    return ReductionSystem.from_strings(alg, rules)


def rewriting_examples_suite(I: Sequence[int], k_bound: int = 4, max_len: int = 6,
                             unit_variant: bool = False, field_: Field | str = "Q") -> Certificate:
    """Diamond check, witnesses for k in I, and bounded absence of witnesses for k not in I.

    The rules send monomials to monomials, so a^k r a^k = a^k has a solution r
    in the span of the normal words of length <= L iff one such word works.
    """
    S = power_system(I, unit_variant, field_)
    alg = S.algebra
    diamond = check_diamond(S)
    ids = {"ambiguities resolvable": diamond.resolvable}
    data: dict = {"ambiguities": len(diamond.ambiguities), "searched": {}}
    for k in range(1, k_bound + 1):
        ak = S.normal_form(alg.parse(f"a^{k}"))
        if k in I:
            x = alg.gen(f"x{k}")
            ids[f"a^{k} x{k} a^{k} = a^{k}"] = S.mul(S.mul(ak, x), ak) == ak
            continue
        hits = []
        count = 0
        for word in S.normal_words(max_len):
            count += 1
            r = alg.monomial(word)
            if S.mul(S.mul(ak, r), ak) == ak:
                hits.append(alg.fmt_word(word))
        data["searched"][k] = count
        ids[f"no r of length <= {max_len} with a^{k} r a^{k} = a^{k}"] = not hits
    _require(ids, "power regularity rewriting")
    return Certificate("rewriting examples", ids, data)
