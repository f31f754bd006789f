"""Buchberger's algorithm on polynomial vectors, plus the ideal-level API.

Vectors (elements of a free module) are dicts ``{(component, exponents): coeff}``;
a polynomial is a vector supported on component 0.  One engine therefore serves
ideals, submodules and syzygy computations.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .poly import CoefficientField, Exps, Polynomial, PolyRing

MINUS_INF = -math.inf

Term = tuple[int, Exps]
Vector = dict


# ---------------------------------------------------------------------------
# term orders on free modules


class ModuleOrder:
    """A term order on ``(component, exponents)`` given by a sort key."""

    def __init__(self, fn: Callable[[int, Exps], tuple]):
        self._fn = fn
        self._cache: dict = {}

    def key(self, t: Term):
        try:
            return self._cache[t]
        except KeyError:
            k = self._cache[t] = self._fn(t[0], t[1])
            return k

    def lead(self, v: Vector) -> Term:
        return max(v, key=self.key)


def top_order(mono_key, degrees: Sequence[int] | None = None) -> ModuleOrder:
    """Term over position; graded by ``degrees`` of the basis when given."""
    if degrees is None:
        return ModuleOrder(lambda c, e: (mono_key(e), -c))
    degrees = tuple(degrees)
    return ModuleOrder(lambda c, e: (sum(e) + degrees[c], mono_key(e), -c))


def pot_order(mono_key) -> ModuleOrder:
    return ModuleOrder(lambda c, e: (-c, mono_key(e)))


def schreyer_order(base: ModuleOrder, leads: Sequence[Term]) -> ModuleOrder:
    """Order on a free module mapping e_j to a vector with leading term ``leads[j]``:
    compare images of terms in ``base``, break ties by position."""
    leads = tuple(leads)
    bkey = base.key

    def fn(j, e):
        c, le = leads[j]
        return (bkey((c, tuple(a + b for a, b in zip(e, le)))), -j)

    return ModuleOrder(fn)


def elimination_order(mono_key, k: int) -> ModuleOrder:
    """Block order eliminating the first ``k`` variables (lex on the block)."""
    return ModuleOrder(lambda c, e: (e[:k], mono_key(e[k:]), -c))


# ---------------------------------------------------------------------------
# vector arithmetic


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _sub(a: Exps, b: Exps) -> Exps:
    return tuple(x - y for x, y in zip(a, b))


def _lcm(a: Exps, b: Exps) -> Exps:
    return tuple(x if x > y else y for x, y in zip(a, b))


def axpy(v: Vector, c, shift: Exps, w: Vector, p: int) -> None:
    """In place ``v += c * x^shift * w``."""
    for (comp, e), a in w.items():
        t = (comp, tuple(x + y for x, y in zip(e, shift)))
        val = v.get(t, 0) + c * a
        if p:
            val %= p
        if val:
            v[t] = val
        else:
            del v[t]


def scale(v: Vector, c, p: int) -> Vector:
    if p:
        return {t: a * c % p for t, a in v.items() if a * c % p}
    return {t: a * c for t, a in v.items() if a * c}


def normalize_coeff(c, field: CoefficientField):
    return field(c)


def poly_times_vector(f: dict, w: Vector, p: int) -> Vector:
    """Polynomial (as ``{exps: coeff}``) times vector."""
    out: Vector = {}
    for e, c in f.items():
        axpy(out, c, e, w, p)
    return out


def vector_degree(v: Vector, degrees: Sequence[int]) -> int:
    """Degree of a homogeneous vector in a free module with basis ``degrees``."""
    (c, e) = next(iter(v))
    return sum(e) + degrees[c]


def is_homogeneous_vector(v: Vector, degrees: Sequence[int]) -> bool:
    return len({sum(e) + degrees[c] for c, e in v}) <= 1


# ---------------------------------------------------------------------------
# Buchberger


class GBResult:
    """Output of :func:`buchberger`: a (non-reduced) Groebner basis of the span of
    the input vectors, optionally with generators of their syzygy module."""

    def __init__(self, order, field, elements, leads, syzygies):
        self.order = order
        self.field = field
        self.elements: list[Vector] = elements
        self.leads: list[Term] = leads
        self.syzygies: list[Vector] | None = syzygies
        by_comp = defaultdict(list)
        for i, (c, e) in enumerate(leads):
            by_comp[c].append((e, i))
        self._by_comp = dict(by_comp)

    def find_divisor(self, t: Term) -> int | None:
        c, e = t
        for le, i in self._by_comp.get(c, ()):
            if _divides(le, e):
                return i
        return None

    def normal_form(self, v: Vector) -> Vector:
        """Full reduction of ``v``; zero iff ``v`` lies in the span."""
        p = self.field.characteristic
        v = dict(v)
        rem: Vector = {}
        key = self.order.key
        G = self.elements
        while v:
            t = max(v, key=key)
            i = self.find_divisor(t)
            c = v[t]
            if i is None:
                rem[t] = c
                del v[t]
            else:
                axpy(v, -c, _sub(t[1], self.leads[i][1]), G[i], p)
        return rem

    def contains(self, v: Vector) -> bool:
        p = self.field.characteristic
        v = dict(v)
        key = self.order.key
        G = self.elements
        while v:
            t = max(v, key=key)
            i = self.find_divisor(t)
            if i is None:
                return False
            axpy(v, -v[t], _sub(t[1], self.leads[i][1]), G[i], p)
        return True


def buchberger(
    gens: Sequence[Vector],
    order: ModuleOrder,
    field: CoefficientField,
    nvars: int,
    *,
    degrees: Sequence[int] | None = None,
    syzygies: bool = False,
    product_criterion: bool = False,
) -> GBResult:
    """Groebner basis of the submodule spanned by ``gens``.

    Pairs are taken by the normal strategy (smallest lcm degree first, where the
    degree of a term adds ``degrees[component]``); Buchberger's chain criterion
    always applies and the coprime criterion only when ``product_criterion``
    (valid for ideals).  With ``syzygies=True`` the result carries generators of
    the syzygy module of ``gens`` (vectors indexed by input position), obtained
    from S-pairs reducing to zero (Schreyer).
    """
    p = field.characteristic
    key = order.key
    zero_shift = (0,) * nvars
    G: list[Vector] = []
    leads: list[Term] = []
    reps: list[Vector] = []
    syz: list[Vector] | None = [] if syzygies else None
    by_comp: dict[int, list[int]] = defaultdict(list)
    heap: list = []
    pending: set = set()
    counter = 0

    def pair_degree(c, L):
        return sum(L) + (degrees[c] if degrees is not None else 0)

    def add(g: Vector, rep: Vector | None):
        nonlocal counter
        k = len(G)
        t = max(g, key=key)
        lc = g[t]
        if lc != 1:
            inv = field.div(1, lc)
            g = scale(g, inv, p) if p else {s: field(a * inv) for s, a in g.items()}
            if rep is not None:
                rep = scale(rep, inv, p) if p else {s: field(a * inv) for s, a in rep.items()}
        G.append(g)
        leads.append(t)
        reps.append(rep)
        c, e = t
        for j in by_comp[c]:
            ej = leads[j][1]
            L = _lcm(e, ej)
            if product_criterion and all(not (a and b) for a, b in zip(e, ej)):
                if syz is not None:
                    s = poly_times_vector({x: a for (_, x), a in g.items()}, reps[j], p)
                    axpy(s, -1, zero_shift, poly_times_vector(
                        {x: a for (_, x), a in G[j].items()}, rep, p), p)
                    if s:
                        syz.append(s)
                continue
            counter += 1
            heapq.heappush(heap, (pair_degree(c, L), key((c, L)), counter, j, k))
            pending.add((j, k))
        by_comp[c].append(k)

    for idx, g in enumerate(gens):
        if not g:
            if syz is not None:
                syz.append({(idx, zero_shift): 1})
            continue
        add(dict(g), {(idx, zero_shift): 1} if syz is not None else None)

    while heap:
        _, _, _, i, j = heapq.heappop(heap)
        pending.discard((i, j))
        c = leads[i][0]
        L = _lcm(leads[i][1], leads[j][1])
        skip = False
        for k in by_comp[c]:
            if k == i or k == j:
                continue
            if _divides(leads[k][1], L):
                a, b = (i, k) if i < k else (k, i)
                a2, b2 = (j, k) if j < k else (k, j)
                if (a, b) not in pending and (a2, b2) not in pending:
                    skip = True
                    break
        if skip:
            continue
        s: Vector = {}
        axpy(s, 1, _sub(L, leads[i][1]), G[i], p)
        axpy(s, -1, _sub(L, leads[j][1]), G[j], p)
        rep = None
        if syz is not None:
            rep = {}
            axpy(rep, 1, _sub(L, leads[i][1]), reps[i], p)
            axpy(rep, -1, _sub(L, leads[j][1]), reps[j], p)
        # top reduction
        while s:
            t = max(s, key=key)
            cc, e = t
            r = None
            for k in by_comp[cc]:
                if _divides(leads[k][1], e):
                    r = k
                    break
            if r is None:
                break
            a = s[t]
            shift = _sub(e, leads[r][1])
            axpy(s, -a, shift, G[r], p)
            if rep is not None:
                axpy(rep, -a, shift, reps[r], p)
        if s:
            add(s, rep)
        elif rep:
            syz.append(rep)

    return GBResult(order, field, G, leads, syz)


# ---------------------------------------------------------------------------
# ideals


def _poly_vec(f: Polynomial) -> Vector:
    return {(0, e): c for e, c in f._dict.items()}


def _vec_poly(ring: PolyRing, v: Vector) -> Polynomial:
    return Polynomial._from_dict(ring, {e: c for (_, e), c in v.items()})


def _ring_order(ring: PolyRing) -> ModuleOrder:
    mk = ring.order.key
    return ModuleOrder(lambda c, e: mk(e))


class GroebnerBasis:
    """Reduced, monic Groebner basis of an ideal for the ring's order."""

    def __init__(self, ring: PolyRing, elements: Sequence[Polynomial]):
        self.ring = ring
        self.order = ring.order
        key = ring.order.key
        self.elements: tuple[Polynomial, ...] = tuple(
            sorted(elements, key=lambda g: key(g.leading_monomial), reverse=True)
        )
        self._gb = GBResult(
            _ring_order(ring), ring.field, [_poly_vec(g) for g in self.elements],
            [(0, g.leading_monomial) for g in self.elements], None,
        )

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def leading_monomials(self) -> list[Exps]:
        return [g.leading_monomial for g in self.elements]

    def normal_form(self, f: Polynomial) -> Polynomial:
        return _vec_poly(self.ring, self._gb.normal_form(_poly_vec(f)))

    def contains(self, f: Polynomial) -> bool:
        return self._gb.contains(_poly_vec(f))

    def is_unit(self) -> bool:
        return any(not any(e) for e in self.leading_monomials())


def _interreduce(ring: PolyRing, res: GBResult) -> list[Polynomial]:
    """Reduced basis from a (non-minimal) Groebner basis."""
    order = res.order
    items = sorted(zip(res.leads, res.elements), key=lambda t: order.key(t[0]))
    minimal: list[tuple[Term, Vector]] = []
    for t, g in items:  # ascending: keep a lead only if no kept lead divides it
        if not any(_divides(u[1], t[1]) for u, _ in minimal):
            minimal.append((t, g))
    base = GBResult(order, ring.field, [g for _, g in minimal], [t for t, _ in minimal], None)
    out = []
    for idx, (t, g) in enumerate(minimal):
        rest = dict(g)
        del rest[t]
        tail = base.normal_form(rest)
        tail[t] = 1
        out.append(_vec_poly(ring, tail))
    return out


def buchberger_reduced(ideal: Ideal | Iterable[Polynomial]) -> GroebnerBasis:
    """Reduced Groebner basis; unique for (ideal, order)."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(list(ideal))
    return ideal.groebner()


def _compute_reduced(ring: PolyRing, gens: Sequence[Polynomial]) -> GroebnerBasis:
    if not gens:
        return GroebnerBasis(ring, [])
    res = buchberger([_poly_vec(g) for g in gens], _ring_order(ring), ring.field, ring.nvars,
                     product_criterion=True)
    return GroebnerBasis(ring, _interreduce(ring, res))


def divide_with_remainder(f: Polynomial, divisors: Sequence[Polynomial]):
    """Multivariate division: ``f = sum(q_i * g_i) + r``; at each step the first
    divisor whose leading monomial divides the current leading term is used."""
    ring = f.ring
    for g in divisors:
        if g.ring != ring:
            raise ValueError("polynomials belong to different rings")
        if not g:
            raise ValueError("division by the zero polynomial")
    F = ring.field
    key = ring.order.key
    p = dict(f._dict)
    quotients = [dict() for _ in divisors]
    rem: dict = {}
    lms = [(g.leading_monomial, g.leading_coefficient) for g in divisors]
    while p:
        e = max(p, key=key)
        c = p[e]
        for i, (lm, lc) in enumerate(lms):
            if _divides(lm, e):
                shift = _sub(e, lm)
                q = F.div(c, lc)
                quotients[i][shift] = F(quotients[i].get(shift, 0) + q)
                for ge, gc in divisors[i]._dict.items():
                    t = tuple(a + b for a, b in zip(ge, shift))
                    v = F(p.get(t, 0) - q * gc)
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            rem[e] = c
            del p[e]
    qs = [Polynomial(ring, {e: c for e, c in q.items() if c}) for q in quotients]
    return qs, Polynomial._from_dict(ring, rem)


def _minimalize_monomials(monos: Iterable[Exps]) -> list[Exps]:
    monos = sorted(set(monos), key=lambda e: (sum(e), e))
    out: list[Exps] = []
    for e in monos:
        if not any(_divides(g, e) for g in out):
            out.append(e)
    return out


class Ideal:
    """Ideal of a polynomial ring given by generators; the reduced Groebner basis
    is computed once on demand."""

    def __init__(self, generators: Sequence[Polynomial], ring: PolyRing | None = None):
        generators = list(generators)
        if ring is None:
            if not generators:
                raise ValueError("ring required for the zero ideal")
            ring = generators[0].ring
        for g in generators:
            if g.ring != ring:
                raise ValueError("generators belong to different rings")
        self.ring = ring
        self.generators: tuple[Polynomial, ...] = tuple(g for g in generators if g)

    @classmethod
    def from_monomials(cls, ring: PolyRing, exps: Iterable[Exps]) -> Ideal:
        return cls([ring.monomial(e) for e in exps], ring)

    @classmethod
    def parse(cls, ring: PolyRing, texts: Iterable[str]) -> Ideal:
        return cls([ring.parse(t) for t in texts], ring)

    def groebner(self) -> GroebnerBasis:
        return self._groebner

    @cached_property
    def _groebner(self) -> GroebnerBasis:
        if self.is_monomial():
            mons = _minimalize_monomials(g.leading_monomial for g in self.generators)
            return GroebnerBasis(self.ring, [self.ring.monomial(e) for e in mons])
        return _compute_reduced(self.ring, self.generators)

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.generators)

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def is_zero(self) -> bool:
        return not self.generators

    def is_unit(self) -> bool:
        return self.groebner().is_unit()

    def contains(self, f: Polynomial) -> bool:
        return ideal_membership(f, self)

    def minimal_monomial_generators(self) -> list[Exps]:
        if not self.is_monomial():
            raise ValueError("not a monomial ideal")
        return _minimalize_monomials(g.leading_monomial for g in self.generators)

    def __add__(self, other: Ideal) -> Ideal:
        return ideal_combine(self, other, "sum")

    def __mul__(self, other: Ideal) -> Ideal:
        return ideal_combine(self, other, "product")

    def __pow__(self, k: int) -> Ideal:
        return ideal_combine(self, None, "power", k)

    def __and__(self, other: Ideal) -> Ideal:
        return ideal_combine(self, other, "intersection")

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.groebner().elements == other.groebner().elements

    def __hash__(self):
        return hash((self.ring, self.groebner().elements))

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    def __repr__(self):
        return f"Ideal{self}"


def ideal_membership(f: Polynomial, ideal: Ideal) -> bool:
    if f.ring != ideal.ring:
        raise ValueError("polynomial and ideal belong to different rings")
    return ideal.groebner().contains(f)


def _intersection(I: Ideal, J: Ideal) -> Ideal:
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return Ideal([], ring)
    if I.is_monomial() and J.is_monomial():
        a = I.minimal_monomial_generators()
        b = J.minimal_monomial_generators()
        return Ideal.from_monomials(ring, _minimalize_monomials(_lcm(x, y) for x in a for y in b))
    # t*I + (1-t)*J with t eliminated; t is the extra leading coordinate
    p = ring.field.characteristic
    gens = []
    for f in I.generators:
        gens.append({(0, (1,) + e): c for e, c in f._dict.items()})
    for g in J.generators:
        v = {(0, (0,) + e): c for e, c in g._dict.items()}
        axpy(v, -1, (1,) + (0,) * ring.nvars, {(0, (0,) + e): c for e, c in g._dict.items()}, p)
        gens.append(v)
    order = elimination_order(ring.order.key, 1)
    res = buchberger(gens, order, ring.field, ring.nvars + 1, product_criterion=True)
    keep = [
        Polynomial._from_dict(ring, {e[1:]: c for (_, e), c in g.items()})
        for g in res.elements
        if all(e[0] == 0 for (_, e) in g)
    ]
    return Ideal(buchberger_reduced(Ideal(keep, ring)).elements, ring)


def ideal_combine(I: Ideal, J: Ideal | None, op: str, k: int | None = None) -> Ideal:
    """Sum, product, k-th power (``J`` ignored) or intersection of ideals."""
    ring = I.ring
    if J is not None and J.ring != ring:
        raise ValueError("ideals belong to different rings")
    if op == "sum":
        return Ideal(list(I.generators) + list(J.generators), ring)
    if op == "product":
        prods = [f * g for f in I.generators for g in J.generators]
        if I.is_monomial() and J.is_monomial():
            return Ideal.from_monomials(ring, _minimalize_monomials(f.leading_monomial for f in prods))
        return Ideal(prods, ring)
    if op == "power":
        if k is None or k < 1:
            raise ValueError("power needs k >= 1")
        result = I
        for _ in range(k - 1):
            result = ideal_combine(result, I, "product")
        return result
    if op == "intersection":
        return _intersection(I, J)
    raise ValueError(f"unknown ideal operation {op!r}")


def monomial_dimension(nvars: int, monos: Iterable[Exps]) -> int | float:
    """dim k[x]/J for the monomial ideal J: size of a largest set of variables
    containing the support of no generator."""
    supports = [frozenset(i for i, x in enumerate(e) if x) for e in monos]
    if any(not s for s in supports):
        return MINUS_INF
    for size in range(nvars, -1, -1):
        for U in combinations(range(nvars), size):
            U = frozenset(U)
            if not any(s <= U for s in supports):
                return size
    return 0


def krull_dimension_ideal(ideal: Ideal) -> int | float:
    """dim R/I via a maximal independent set of the initial ideal; ``-inf`` for (1)."""
    gb = ideal.groebner()
    return monomial_dimension(ideal.ring.nvars, gb.leading_monomials())
