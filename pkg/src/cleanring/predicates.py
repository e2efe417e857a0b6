"""Decision procedures for regularity and cleanness properties of ring elements.

Searches run on the tabulated copy of a finite ring handle (indices and flat
tables, see :class:`cleanring.matring.FiniteRing`); every positive verdict
carries a witness that :func:`verify_witness` re-checks with the handle's own
arithmetic.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from . import linalg
from .matring import (DEFAULT_SIZE_CAP, FiniteRing, MatrixRing, SquareMatrix, tabulate)
from .scalars import Field, UnsupportedOperation

CONDITIONS = (1, 2, 3, 4, 5, 6)


class InconsistentCornerError(AssertionError):
    """Different inner inverses gave different corner verdicts."""


@dataclass
class DecisionReport:
    predicate: str
    element: Any
    verdict: bool
    witnesses: dict = field(default_factory=dict)
    searched: int = 0
    elapsed: float = 0.0

    def to_json(self, ring) -> dict:
        return {"predicate": self.predicate, "element": ring.to_json(self.element), "verdict": self.verdict,
                "witnesses": {k: ring.to_json(v) for k, v in self.witnesses.items()},
                "searched": self.searched}


@dataclass
class CorrespondenceProfile:
    element: Any
    conditions: dict  # condition number -> bool
    witnesses: dict  # condition number -> dict of named handle elements

    @property
    def consistent(self) -> bool:
        return len(set(self.conditions.values())) == 1

    @property
    def verdict(self) -> bool:
        return self.conditions[1]

    def to_json(self, ring) -> dict:
        return {"element": ring.to_json(self.element),
                "conditions": {str(k): v for k, v in self.conditions.items()},
                "consistent": self.consistent,
                "witnesses": {str(k): {n: ring.to_json(x) for n, x in w.items()}
                              for k, w in self.witnesses.items()}}


# --- cached analysis of a tabulated ring ---------------------------------------

class _Analysis:
    def __init__(self, t: FiniteRing):
        self.t = t
        self.units = t.units()
        self.idem = t.idempotents()
        self._ideals: dict[int, frozenset] = {}
        self._corner_units: dict[int, list[int]] = {}

    def ideal(self, a: int) -> frozenset:
        s = self._ideals.get(a)
        if s is None:
            s = self._ideals[a] = frozenset(self.t.right_ideal(a))
        return s

    def meets_zero(self, a: int, b: int) -> bool:
        small, big = sorted((self.ideal(a), self.ideal(b)), key=len)
        z = self.t.zero
        return all(x == z or x not in big for x in small)

    def corner_units(self, e: int) -> list[int]:
        """Units of eRe: corner elements x with x + (1 - e) a unit of R."""
        cu = self._corner_units.get(e)
        if cu is None:
            t = self.t
            f = t.sub(t.one, e)
            corner = {t.mul(t.mul(e, x), e) for x in range(t.N)}
            cu = self._corner_units[e] = sorted(x for x in corner if t.add(x, f) in self.units)
        return cu

    def corner_ureg(self, e: int, alpha: int) -> int | None:
        """A unit mu of eRe with alpha mu alpha = alpha, or None."""
        m = self.t.mul
        for mu in self.corner_units(e):
            if m(m(alpha, mu), alpha) == alpha:
                return mu
        return None


def _analysis(t: FiniteRing) -> _Analysis:
    an = getattr(t, "_analysis", None)
    if an is None:
        an = t._analysis = _Analysis(t)
    return an


def _finite(ring, cap: int = DEFAULT_SIZE_CAP) -> FiniteRing:
    if not getattr(ring, "is_finite", False):
        raise UnsupportedOperation(f"{ring.name} is not enumerable")
    return tabulate(ring, cap)


def _idx(t: FiniteRing, ring, x) -> int:
    return x if ring is t else t.index_of(x)


def _lab(t: FiniteRing, ring, i: int):
    return i if ring is t else t.label(i)


# --- inner inverses and cleanness ---------------------------------------------------

def _over_field(ring) -> bool:
    return isinstance(ring, MatrixRing) and ring.shape is None and isinstance(ring.base, Field)


def find_inner_inverses(a, ring, units_only: bool = False, first: bool = False) -> list:
    """All r with a r a = a (only units when ``units_only``).

    Tabulated rings give the complete list; matrices over an infinite field,
    or too large to tabulate, give one unit witness from a rank factorization.
    """
    large = getattr(ring, "is_finite", False) and ring.size() > DEFAULT_SIZE_CAP
    if getattr(ring, "is_finite", False) and not (large and _over_field(ring)):
        t = _finite(ring)
        an = _analysis(t)
        out = []
        for r in t.inner_inverses(_idx(t, ring, a)):
            if units_only and r not in an.units:
                continue
            out.append(_lab(t, ring, r))
            if first:
                break
        return out
    if _over_field(ring):
        U = ring.make(linalg.unit_inner_inverse(ring.base, a.tolist()))
        if ring.mul(ring.mul(a, U), a) != a:
            raise AssertionError("unit inner inverse failed re-verification")
        return [U]
    raise UnsupportedOperation(f"no inner-inverse search for {ring.name}")


def is_regular(a, ring) -> bool:
    return bool(find_inner_inverses(a, ring, first=True))


def is_unit_regular(a, ring) -> bool:
    return bool(find_inner_inverses(a, ring, units_only=True, first=True))


def cleanness_decider(a, ring, mode: str = "clean") -> DecisionReport:
    """Search all idempotents e with a - e a unit.

    mode ``strongly`` also asks ea = ae, ``capably`` asks ae = eae.
    """
    if mode not in ("clean", "strongly", "capably"):
        raise ValueError(f"unknown mode {mode!r}")
    start = time.perf_counter()
    t = _finite(ring)
    an = _analysis(t)
    ia = _idx(t, ring, a)
    m = t.mul
    found = None
    for e in an.idem:
        u = t.sub(ia, e)
        if u not in an.units:
            continue
        if mode == "strongly" and m(e, ia) != m(ia, e):
            continue
        if mode == "capably" and m(ia, e) != m(m(e, ia), e):
            continue
        found = (e, u)
        break
    wit = {} if found is None else {"e": _lab(t, ring, found[0]), "u": _lab(t, ring, found[1])}
    rep = DecisionReport(mode, a, found is not None, wit, len(an.idem), time.perf_counter() - start)
    if rep.verdict and not verify_witness(ring, a, mode, rep.witnesses):
        raise AssertionError(f"{mode} witness failed re-verification")
    return rep


# --- the zero-column criterion ----------------------------------------------------------

@dataclass
class FirstColumnReport:
    alpha: Any
    tau: Any
    condition2: bool
    condition2_parts: tuple[bool, bool]
    condition3: bool
    weakly_clean: bool | None  # only evaluated when tau = 0


def firstcol_check(ring, e, a, eps, mu, beta, gamma) -> FirstColumnReport:
    """Evaluate both displayed conditions of the zero-column criterion for given data."""
    R = ring
    m = R.mul
    problems = []
    if not R.eq(m(e, e), e):
        raise ValueError("e: not idempotent")
    f = R.sub(R.one, e)
    if not R.eq(m(a, e), a):
        problems.append("a: not in Re")
    if not (R.eq(m(m(e, eps), e), eps) and R.eq(m(eps, eps), eps)):
        problems.append("eps: not an idempotent of eRe")
    if not R.eq(m(m(e, mu), e), mu) or R.inverse(R.add(mu, f)) is None:
        problems.append("mu: not a unit of eRe")
    if not R.eq(m(m(e, beta), f), beta):
        problems.append("beta: not in eRf")
    if not R.eq(m(m(f, gamma), e), gamma):
        problems.append("gamma: not in fRe")
    if problems:
        raise ValueError("; ".join(problems))
    alpha = m(m(e, a), e)
    tau = m(m(f, a), e)
    inner = R.add(tau, m(gamma, alpha))
    zeta = R.sub(e, eps)
    first = R.eq(eps, R.add(m(m(eps, mu), alpha), m(m(eps, beta), inner)))
    second = R.eq(zeta, R.neg(m(m(zeta, mu), R.sub(e, alpha))))
    third = R.eq(alpha, R.add(R.add(eps, mu), m(m(zeta, beta), inner)))
    weakly = None
    if R.is_zero(tau):
        weakly = R.eq(alpha, R.add(R.add(eps, mu), m(m(m(zeta, beta), gamma), alpha)))
    return FirstColumnReport(alpha, tau, first and second, (first, second), third, weakly)


def firstcol_search(ring, e, a) -> dict:
    """Exhaustive search for data satisfying condition (2), resp. (3), of the
    zero-column criterion; returns verdicts and first witnesses."""
    t = _finite(ring)
    an = _analysis(t)
    ie, ia = _idx(t, ring, e), _idx(t, ring, a)
    m, add, sub, neg = t.mul, t.add, t.sub, t.neg
    f = sub(t.one, ie)
    corner = sorted({m(m(ie, x), ie) for x in range(t.N)})
    idem_c = [x for x in corner if m(x, x) == x]
    units_c = an.corner_units(ie)
    ef = sorted({m(m(ie, x), f) for x in range(t.N)})
    fe = sorted({m(m(f, x), ie) for x in range(t.N)})
    alpha = m(m(ie, ia), ie)
    tau = m(m(f, ia), ie)
    e_minus_alpha = sub(ie, alpha)
    w2 = w3 = None
    for eps in idem_c:
        zeta = sub(ie, eps)
        for mu in units_c:
            second = zeta == neg(m(m(zeta, mu), e_minus_alpha))
            base1 = m(m(eps, mu), alpha)
            base3 = add(eps, mu)
            for gamma in fe:
                inner = add(tau, m(gamma, alpha))
                for beta in ef:
                    if w2 is None and second and eps == add(base1, m(m(eps, beta), inner)):
                        w2 = (eps, mu, beta, gamma)
                    if w3 is None and alpha == add(base3, m(m(zeta, beta), inner)):
                        w3 = (eps, mu, beta, gamma)
                    if w2 is not None and w3 is not None:
                        break
                if w2 is not None and w3 is not None:
                    break
            if w2 is not None and w3 is not None:
                break
        if w2 is not None and w3 is not None:
            break
    names = ("eps", "mu", "beta", "gamma")
    lab = lambda w: None if w is None else dict(zip(names, (_lab(t, ring, x) for x in w)))
    return {"condition2": w2 is not None, "condition3": w3 is not None,
            "witness2": lab(w2), "witness3": lab(w3),
            "searched": len(idem_c) * len(units_c) * len(ef) * len(fe)}


# --- the six equivalent conditions ------------------------------------------------

def _corner_verdicts(an: _Analysis, a: int, candidates: list[int], label: str):
    """Verdict of eae unit-regular in eRe (e = r a) for every candidate r;
    they must all agree."""
    t = an.t
    m = t.mul
    verdicts = {}
    for r in candidates:
        e = m(r, a)
        mu = an.corner_ureg(e, m(m(e, a), e))
        verdicts[r] = mu
    kinds = {mu is not None for mu in verdicts.values()}
    if len(kinds) > 1:
        raise InconsistentCornerError(f"condition {label}: corner verdict depends on the inner inverse chosen")
    for r, mu in verdicts.items():
        if mu is not None:
            return True, (r, mu)
    return False, None


def correspondence_check(a, ring) -> CorrespondenceProfile:
    """Evaluate conditions (1)-(6) by exhaustive witness search."""
    t = _finite(ring)
    an = _analysis(t)
    ia = _idx(t, ring, a)
    m, sub, neg = t.mul, t.sub, t.neg
    one = t.one
    L = lambda i: _lab(t, ring, i)
    conds: dict[int, bool] = {}
    wits: dict[int, dict] = {}

    inner = t.inner_inverses(ia)
    ok, w = _corner_verdicts(an, ia, [r for r in inner if r in an.units], "(1)")
    conds[1] = ok
    if ok:
        wits[1] = {"u": L(w[0]), "mu": L(w[1])}
    ok, w = _corner_verdicts(an, ia, inner, "(2)")
    conds[2] = ok
    if ok:
        wits[2] = {"r": L(w[0]), "mu": L(w[1])}

    one_minus_a = sub(one, ia)
    found = None
    for g in an.idem:
        h = sub(one, g)
        for v in an.units:
            if m(m(g, v), ia) != g:
                continue
            if h != neg(m(m(h, v), one_minus_a)):
                continue
            if m(m(h, v), h) != neg(h):
                continue
            gvh = m(m(g, v), h)
            if m(m(m(gvh, v), g), gvh) != neg(gvh):
                continue
            found = (g, v)
            break
        if found:
            break
    conds[3] = found is not None
    if found:
        wits[3] = {"g": L(found[0]), "v": L(found[1])}

    a2 = m(ia, ia)
    c4 = c5 = c6 = None
    for e in an.idem:
        u = sub(ia, e)
        if u not in an.units:
            continue
        ui = an.units[u]
        if c4 is None or c5 is None:
            if an.meets_zero(ia, e):
                ae = m(ia, e)
                if c4 is None and an.meets_zero(a2, ae):
                    c4 = (e, u)
                if c5 is None and an.meets_zero(a2, m(ae, ia)):
                    c5 = (e, u)
        if c6 is None and m(m(ia, ui), ia) == ia and m(m(a2, m(ui, ui)), a2) == a2:
            c6 = (e, u)
    for k, c in ((4, c4), (5, c5), (6, c6)):
        conds[k] = c is not None
        if c is not None:
            wits[k] = {"e": L(c[0]), "u": L(c[1])}
    prof = CorrespondenceProfile(a, conds, wits)
    for k, w in wits.items():
        if not verify_witness(ring, a, f"condition{k}", w):
            raise AssertionError(f"condition ({k}) witness failed re-verification")
    return prof


def _meets_zero_handle(ring, x, y) -> bool:
    """aR and bR intersect in 0, recomputed from the handle's own products."""
    els = list(ring.elements())
    xs = {ring.mul(x, r) for r in els}
    ys = {ring.mul(y, r) for r in els}
    return xs & ys == {ring.zero}


def verify_witness(ring, a, kind: str, w: dict) -> bool:
    """Re-check a witness with the ring handle's arithmetic (not the tables)."""
    R = ring
    m = R.mul
    eq = R.eq
    one = R.one
    if kind in ("clean", "strongly", "capably"):
        e, u = w["e"], w["u"]
        ok = eq(m(e, e), e) and R.inverse(u) is not None and eq(R.add(e, u), a)
        if kind == "strongly":
            ok = ok and eq(m(e, u), m(u, e))
        if kind == "capably":
            ok = ok and eq(m(a, e), m(m(e, a), e))
        return ok
    if kind in ("condition1", "condition2"):
        r = w["u"] if kind == "condition1" else w["r"]
        if kind == "condition1" and R.inverse(r) is None:
            return False
        if not eq(m(m(a, r), a), a):
            return False
        e = m(r, a)
        mu = w["mu"]
        f = R.sub(one, e)
        alpha = m(m(e, a), e)
        return (eq(m(m(e, mu), e), mu) and R.inverse(R.add(mu, f)) is not None
                and eq(m(m(alpha, mu), alpha), alpha))
    if kind == "condition3":
        g, v = w["g"], w["v"]
        h = R.sub(one, g)
        gvh = m(m(g, v), h)
        return (eq(m(g, g), g) and R.inverse(v) is not None and eq(m(m(g, v), a), g)
                and eq(h, R.neg(m(m(h, v), R.sub(one, a)))) and eq(m(m(h, v), h), R.neg(h))
                and eq(m(m(m(gvh, v), g), gvh), R.neg(gvh)))
    if kind in ("condition4", "condition5", "condition6"):
        e, u = w["e"], w["u"]
        ui = R.inverse(u)
        if ui is None or not eq(m(e, e), e) or not eq(R.add(e, u), a):
            return False
        a2 = m(a, a)
        if kind == "condition6":
            return eq(m(m(a, ui), a), a) and eq(m(m(a2, m(ui, ui)), a2), a2)
        if not _meets_zero_handle(R, a, e):
            return False
        second = m(a, e) if kind == "condition4" else m(m(a, e), a)
        return _meets_zero_handle(R, a2, second)
    raise ValueError(f"unknown witness kind {kind!r}")


# --- kernel and image of a matrix in M_n(F_q) ------------------------------------------

@dataclass
class RegDirectReport:
    rank: int
    dim_kernel: int
    dim_cokernel: int
    restricted: list  # matrix of a on its image, in a row basis of the image
    restricted_unit_inner_inverse: list | None
    regular: bool
    condition7: bool


def reg_direct_check(a: SquareMatrix) -> RegDirectReport:
    """Kernel/cokernel dimensions of a acting on row vectors, and unit-regularity
    of its restriction to the image M a."""
    R = a.ring
    F = R.base
    if not isinstance(F, Field):
        raise UnsupportedOperation("reg_direct_check needs a matrix over a field")
    A = a.tolist()
    n = R.n
    M, piv = linalg.rref(F, A)
    k = len(piv)
    basis = [M[i] for i in range(k)]
    # b A = sum_j C[i][j] b_j for each basis row b_i
    C = []
    if k:
        Bt = linalg.transpose(basis)
        for b in basis:
            image = linalg.matmul(F, [b], A)[0]
            sol = linalg.solve(F, Bt, image)
            if sol is None:
                raise AssertionError("image is not invariant under a")
            C.append(sol)
    U = None
    ureg = True
    if k:
        U = linalg.unit_inner_inverse(F, C)
        ureg = linalg.matmul(F, linalg.matmul(F, C, U), C) == C and linalg.inverse(F, U) is not None
    regular = is_regular(a, R)
    return RegDirectReport(k, n - k, n - k, C, U, regular, regular and ureg)


# --- census -------------------------------------------------------------------------

@dataclass
class Census:
    ring: str
    size: int
    rows: list[dict]
    implications: dict
    stable_range_one: bool | None
    regular_nilpotents: list = field(default_factory=list)

    def count(self, key: str) -> int:
        return sum(1 for r in self.rows if r[key])

    def to_json(self) -> dict:
        return {"ring": self.ring, "size": self.size, "stable_range_one": self.stable_range_one,
                "implications": self.implications, "elements": self.rows,
                "regular_nilpotents": self.regular_nilpotents}


def stable_range_one(ring) -> bool:
    """For all a, b with aR + bR = R there is y with a + by a unit."""
    t = _finite(ring)
    an = _analysis(t)
    units = an.units
    one = t.one
    ideals = [an.ideal(x) for x in range(t.N)]
    for a in range(t.N):
        aR = ideals[a]
        for b in range(t.N):
            bR = ideals[b]
            if not any(t.sub(one, x) in bR for x in aR):
                continue
            if not any(t.add(a, z) in units for z in bR):
                return False
    return True


def ring_scan(ring, cap: int = DEFAULT_SIZE_CAP, check_stable_range: bool = True) -> Census:
    """Per-element predicate table plus implication checks."""
    t = _finite(ring, cap)
    an = _analysis(t)
    m = t.mul
    rows = []
    nil_records = []
    for x in range(t.N):
        inner = t.inner_inverses(x)
        regular = bool(inner)
        ureg = any(r in an.units for r in inner)
        prof = correspondence_check(_lab(t, ring, x), ring)
        clean = any(t.sub(x, e) in an.units for e in an.idem)
        strongly = any(t.sub(x, e) in an.units and m(e, x) == m(x, e) for e in an.idem)
        p, nil = x, False
        for _ in range(t.N + 1):
            if p == t.zero:
                nil = True
                break
            p = m(p, x)
        row = {"index": x, "element": t.to_json(x), "unit": x in an.units, "idempotent": m(x, x) == x,
               "nilpotent": nil, "square_zero": m(x, x) == t.zero, "regular": regular,
               "unit_regular": ureg, "doubly_unit_regular": prof.conditions[2], "clean": clean,
               "strongly_clean": strongly, "profile_consistent": prof.consistent}
        rows.append(row)
        if nil and regular and x != t.zero:
            nil_records.append({"element": t.to_json(x), "unit_regular": ureg})
    sr1 = stable_range_one(ring) if check_stable_range else None
    imp = {
        "unit_regular_implies_regular": all(r["regular"] for r in rows if r["unit_regular"]),
        "doubly_unit_regular_implies_clean": all(r["clean"] for r in rows if r["doubly_unit_regular"]),
        "square_zero_regular_implies_unit_regular_and_clean": all(
            r["unit_regular"] and r["clean"] for r in rows if r["square_zero"] and r["regular"]),
        "profiles_consistent": all(r["profile_consistent"] for r in rows),
    }
    if sr1:
        imp["stable_range_one_regular_implies_clean"] = all(r["clean"] for r in rows if r["regular"])
    return Census(ring.name, t.N, rows, imp, sr1, nil_records)
