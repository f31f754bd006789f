"""Dimension, depth, Cohen-Macaulay defect, Ext, grade and local profiles.

Extended integers are plain ints together with ``math.inf`` / ``-math.inf``:
the zero module has depth ``+inf`` and dimension ``-inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Union

from .groebner import (
    MINUS_INF,
    Ideal,
    Vector,
    buchberger,
    divide_with_remainder,
    krull_dimension_ideal,
)
from .poly import Polynomial, PolyRing
from .resolution import (
    GradedFreeModule,
    ModuleMap,
    PresentedModule,
    module_dimension_initial,
    projective_dimension,
    prune_presentation,
    syzygy_vectors,
)

INF = math.inf
ExtendedInt = Union[int, float]


class NotMonomialError(ValueError):
    """Operation needs a module with a monomial (multigraded) presentation."""


# ---------------------------------------------------------------------------
# primes


@dataclass(frozen=True)
class MonomialPrime:
    """The prime generated by the variables with the given indices."""

    variables: frozenset

    def __init__(self, variables: Iterable[int]):
        object.__setattr__(self, "variables", frozenset(variables))

    @property
    def height(self) -> int:
        return len(self.variables)

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.variables))

    def ideal(self, ring: PolyRing) -> Ideal:
        return Ideal([ring.var(i) for i in self.sorted()], ring)

    def label(self, ring: PolyRing) -> str:
        return "(" + ",".join(ring.variables[i] for i in self.sorted()) + ")"

    @classmethod
    def irrelevant(cls, ring: PolyRing) -> MonomialPrime:
        return cls(range(ring.nvars))

    @classmethod
    def from_names(cls, ring: PolyRing, names: Iterable[str]) -> MonomialPrime:
        return cls(ring.index(n) for n in names)


def all_monomial_primes(nvars: int) -> list[MonomialPrime]:
    """All 2^m monomial primes, by size then lexicographically."""
    return [MonomialPrime(S) for k in range(nvars + 1) for S in combinations(range(nvars), k)]


def as_monomial_prime(ideal: Ideal) -> MonomialPrime | None:
    """The monomial prime equal to ``ideal``, if it is generated by variables."""
    gb = ideal.groebner()
    out = []
    for g in gb:
        e = g.leading_monomial
        if len(g) != 1 or sum(e) != 1:
            return None
        out.append(e.index(1))
    return MonomialPrime(out)


@dataclass(frozen=True)
class LocalProfile:
    prime: object
    height: ExtendedInt
    dim_local: ExtendedInt
    depth_local: ExtendedInt
    cmd_local: ExtendedInt
    in_support: bool

    @classmethod
    def outside(cls, prime, height) -> LocalProfile:
        return cls(prime, height, MINUS_INF, INF, 0, False)

    @classmethod
    def inside(cls, prime, height, dim, depth) -> LocalProfile:
        return cls(prime, height, dim, depth, dim - depth, True)

    def fields(self) -> tuple:
        return (self.height, self.dim_local, self.depth_local, self.cmd_local, self.in_support)


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def _rank_numeric(rows: list[list], field) -> int:
    """Rank of a matrix with entries in the coefficient field."""
    rows = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        inv = field.div(1, pr[c])
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = field(rows[i][c] * inv)
                rows[i] = [field(a - f * b) for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def _exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    (q,), r = divide_with_remainder(f, [g])
    if r:
        raise ArithmeticError("inexact division in fraction-free elimination")
    return q


def rank_over_fraction_field(rows: list[list[Polynomial]]) -> int:
    """Rank over the fraction field by Bareiss fraction-free elimination."""
    A = [list(r) for r in rows]
    if not A or not A[0]:
        return 0
    nr, nc = len(A), len(A[0])
    ring = A[0][0].ring
    prev = ring.one()
    rank = 0
    for c in range(nc):
        piv = next((i for i in range(rank, nr) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        p = A[rank][c]
        for i in range(rank + 1, nr):
            a = A[i][c]
            for j in range(c, nc):
                A[i][j] = _exact_div(p * A[i][j] - a * A[rank][j], prev)
        prev = p
        rank += 1
        if rank == nr:
            break
    return rank


def determinant(rows: list[list[Polynomial]]) -> Polynomial:
    """Determinant by Bareiss elimination with exact division."""
    n = len(rows)
    A = [list(r) for r in rows]
    ring = A[0][0].ring
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return ring.zero()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = _exact_div(A[k][k] * A[i][j] - A[i][k] * A[k][j], prev)
        prev = A[k][k]
    return A[n - 1][n - 1] * sign


# ---------------------------------------------------------------------------
# support, dimension, depth, defect


def fitting_support_ideal(M: PresentedModule) -> Ideal:
    """0th Fitting ideal: maximal minors (of size rank F0) of the presentation."""
    ring = M.ring
    degs, cols = prune_presentation(M.target.degrees, M.presentation.columns, ring.field, ring.nvars)
    r = len(degs)
    if r == 0:
        return Ideal([ring.one()], ring)
    if len(cols) < r:
        return Ideal([], ring)
    T = GradedFreeModule.from_degrees(ring, degs)
    phi = ModuleMap(GradedFreeModule(ring, (0,) * len(cols)), T, cols, check=False)
    mat = phi.matrix
    minors = []
    for S in combinations(range(len(cols)), r):
        d = determinant([[mat[i][j] for j in S] for i in range(r)])
        if d:
            minors.append(d)
    return Ideal(minors, ring)


def is_zero_module(M: PresentedModule) -> bool:
    return M.is_zero()


def module_dimension(M: PresentedModule) -> ExtendedInt:
    """Krull dimension; ``-inf`` for the zero module."""
    if M.target.rank <= 1:
        return krull_dimension_ideal(fitting_support_ideal(M))
    return module_dimension_initial(M)


def module_depth_graded(M: PresentedModule) -> ExtendedInt:
    """Depth at the irrelevant ideal by Auslander-Buchsbaum; ``+inf`` for zero."""
    pd = projective_dimension(M)
    if pd == MINUS_INF:
        return INF
    return M.ring.nvars - pd


def cm_defect(M: PresentedModule) -> int:
    """dim M - depth M at the irrelevant ideal; 0 for the zero module."""
    if M.is_zero():
        return 0
    return module_dimension(M) - module_depth_graded(M)


# ---------------------------------------------------------------------------
# Ext


def _hom_setup(M: PresentedModule, target: PresentedModule | None):
    ring = M.ring
    if target is None:
        return [0], []
    if target.ring != ring:
        raise ValueError("modules over different rings")
    degs, cols = prune_presentation(target.target.degrees, target.presentation.columns,
                                    ring.field, ring.nvars)
    return degs, cols


def _hom_complex_piece(M: PresentedModule, i: int, hdegs, acols):
    """Data for Hom(F_i, N): basis degrees, the dual differential into
    Hom(F_{i+1}, N) as columns, and the relation columns of N^{rank F_i}."""
    res = M.resolution
    h0 = len(hdegs)

    def fdeg(k):
        return res.modules[k].degrees if 0 <= k < len(res.modules) else ()

    Fi = fdeg(i)
    basis_degs = [hdegs[h] - Fi[j] for j in range(len(Fi)) for h in range(h0)]
    # relations A in every copy
    rel = []
    for j in range(len(Fi)):
        for a in acols:
            rel.append({(j * h0 + r, e): c for (r, e), c in a.items()})
    # dual of phi_{i+1}: F_{i+1} -> F_i, column k of phi is phi(e_k)
    dual = []
    if 0 <= i < len(res.maps):
        phi = res.maps[i]
        for j in range(len(Fi)):
            for h in range(h0):
                col: Vector = {}
                for k, colk in enumerate(phi.columns):
                    for (r, e), c in colk.items():
                        if r == j:
                            col[(k * h0 + h, e)] = c
                dual.append(col)
    else:
        dual = [{} for _ in range(len(Fi) * h0)]
    return basis_degs, dual, rel


def _ext_kernel_and_image(M: PresentedModule, i: int, target: PresentedModule | None):
    ring = M.ring
    hdegs, acols = _hom_setup(M, target)
    bdeg, dual, rel = _hom_complex_piece(M, i, hdegs, acols)
    n = len(bdeg)
    if n == 0:
        return bdeg, [], []
    nbdeg, _, nrel = _hom_complex_piece(M, i + 1, hdegs, acols)
    # kernel of Hom(F_i,N) -> Hom(F_{i+1},N) modulo the relations there
    if any(dual):
        tgt = GradedFreeModule.from_degrees(ring, nbdeg)
        syz = syzygy_vectors(dual + nrel, tgt)
        K = []
        for s in syz:
            v = {(c, e): a for (c, e), a in s.items() if c < n}
            if v:
                K.append(v)
    else:
        zero = (0,) * ring.nvars
        K = [{(c, zero): 1} for c in range(n)]
    # image of Hom(F_{i-1},N) plus relations
    image = list(rel)
    if i >= 1:
        _, pdual, _ = _hom_complex_piece(M, i - 1, hdegs, acols)
        image += [c for c in pdual if c]
    return bdeg, K, image


def ext_module(M: PresentedModule, i: int, target: PresentedModule | None = None) -> PresentedModule:
    """Ext^i(M, N) (``N = R`` when ``target`` is None) as a pruned cokernel."""
    ring = M.ring
    if target is None:
        cache = M.__dict__.setdefault("_ext_cache", {})
        if i in cache:
            return cache[i]
    if i < 0 or i > ring.nvars:
        return PresentedModule.zero(ring)
    bdeg, K, image = _ext_kernel_and_image(M, i, target)
    if not K:
        out = PresentedModule.zero(ring)
    else:
        amb = GradedFreeModule.from_degrees(ring, bdeg)
        kdeg = [sum(e) + bdeg[c] for c, e in (next(iter(v)) for v in K)]
        syz = syzygy_vectors(K + image, amb)
        nk = len(K)
        rels = []
        for s in syz:
            v = {(c, e): a for (c, e), a in s.items() if c < nk}
            if v:
                rels.append(v)
        degs, cols = prune_presentation(kdeg, rels, ring.field, ring.nvars)
        T = GradedFreeModule.from_degrees(ring, degs)
        sdeg = [sum(e) + degs[c] for c, e in (next(iter(v)) for v in cols)]
        out = PresentedModule(ModuleMap(GradedFreeModule.from_degrees(ring, sdeg), T, cols, check=False))
    if target is None:
        M.__dict__["_ext_cache"][i] = out
    return out


def ext_vanishes(M: PresentedModule, i: int, target: PresentedModule | None = None) -> bool:
    """Whether Ext^i(M, N) = 0, by submodule containment (no presentation built)."""
    ring = M.ring
    if i < 0 or i > ring.nvars:
        return True
    bdeg, K, image = _ext_kernel_and_image(M, i, target)
    if not K:
        return True
    if not image:
        return False
    amb = GradedFreeModule.from_degrees(ring, bdeg)
    gb = buchberger(image, amb.order(), ring.field, ring.nvars, degrees=amb.degrees,
                    product_criterion=amb.rank == 1)
    return all(gb.contains(v) for v in K)


def ext_modules(M: PresentedModule) -> list[PresentedModule]:
    """Ext^i(M, R) for i = 0..m."""
    return [ext_module(M, i) for i in range(M.ring.nvars + 1)]


_QUOTIENT_CACHE: dict = {}


def _quotient_module(I: Ideal) -> PresentedModule:
    key = (I.ring, I.groebner().elements)
    Q = _QUOTIENT_CACHE.get(key)
    if Q is None:
        Q = _QUOTIENT_CACHE[key] = PresentedModule.cyclic(I)
    return Q


def grade_of_ideal_on_module(I: Ideal, M: PresentedModule) -> ExtendedInt:
    """min{i : Ext^i(R/I, M) != 0}; ``+inf`` when all vanish (M = IM)."""
    if I.ring != M.ring:
        raise ValueError("ideal and module over different rings")
    if I.is_unit():
        raise ValueError("grade needs a proper ideal")
    Q = _quotient_module(I)
    for i in range(M.ring.nvars + 1):
        if not ext_vanishes(Q, i, M):
            return i
    return INF


# ---------------------------------------------------------------------------
# monomial modules and localization


def monomial_multidegrees(M: PresentedModule):
    """Multidegrees ``(rows, cols)`` making every entry of the presentation a
    term of matching multidegree, or None when no such Z^m-grading exists."""
    n = M.ring.nvars
    rows: dict = {}
    cols: dict = {}
    entries = []
    for j, col in enumerate(M.presentation.columns):
        seen = set()
        for (r, e) in col:
            if r in seen:
                return None
            seen.add(r)
            entries.append((r, j, e))
    adj_r: dict = {}
    adj_c: dict = {}
    for r, j, e in entries:
        adj_r.setdefault(r, []).append((j, e))
        adj_c.setdefault(j, []).append((r, e))
    zero = (0,) * n
    for start in range(M.target.rank):
        if start in rows:
            continue
        rows[start] = zero
        stack = [("r", start)]
        while stack:
            kind, idx = stack.pop()
            if kind == "r":
                a = rows[idx]
                for j, e in adj_r.get(idx, ()):
                    b = tuple(x + y for x, y in zip(a, e))
                    if j in cols:
                        if cols[j] != b:
                            return None
                    else:
                        cols[j] = b
                        stack.append(("c", j))
            else:
                b = cols[idx]
                for r, e in adj_c.get(idx, ()):
                    a = tuple(x - y for x, y in zip(b, e))
                    if r in rows:
                        if rows[r] != a:
                            return None
                    else:
                        rows[r] = a
                        stack.append(("r", r))
    for j in range(M.presentation.source.rank):
        cols.setdefault(j, zero)
    return [rows[r] for r in range(M.target.rank)], [cols[j] for j in range(len(cols))]


def is_monomial_module(M: PresentedModule) -> bool:
    return monomial_multidegrees(M) is not None


def _check_monomial(M: PresentedModule):
    md = monomial_multidegrees(M)
    if md is None:
        raise NotMonomialError("module presentation is not monomial")
    return md


def localize_at_monomial_prime(M: PresentedModule, prime: MonomialPrime) -> PresentedModule:
    """Set the variables outside ``prime`` to 1; the result lives over the
    polynomial ring in the variables of ``prime`` and has the same dimension
    and depth as M localized at ``prime``."""
    rows_md, cols_md = _check_monomial(M)
    ring = M.ring
    S = prime.sorted()
    if not S:
        raise ValueError("localization at (0) has no polynomial ring; use local_profile_at_prime")
    sub = ring.with_variables(ring.variables[i] for i in S)
    cols = []
    for col in M.presentation.columns:
        cols.append({(r, tuple(e[i] for i in S)): c for (r, e), c in col.items()})
    rdeg = [sum(a[i] for i in S) for a in rows_md]
    cdeg = [sum(b[i] for i in S) for b in cols_md]
    if M.is_monomial_cyclic() and all(len(c) == 1 for c in cols):
        gens = _minimal_exps([next(iter(c))[1] for c in cols])
        cols = [{(0, e): 1} for e in gens]
        cdeg = [sum(e) + rdeg[0] for e in gens]
    T = GradedFreeModule.from_degrees(sub, rdeg)
    return PresentedModule(ModuleMap(GradedFreeModule.from_degrees(sub, cdeg), T, cols, check=False))


def _minimal_exps(monos):
    monos = sorted(set(monos), key=sum)
    out = []
    for e in monos:
        if not any(all(a <= b for a, b in zip(g, e)) for g in out):
            out.append(e)
    return out


_GRADED_CACHE: dict = {}


def _module_key(M: PresentedModule):
    ring = M.ring
    return (ring.field.characteristic, ring.nvars, ring.order.kind, M.target.degrees,
            tuple(frozenset(c.items()) for c in M.presentation.columns))


def graded_dim_depth(M: PresentedModule) -> tuple[ExtendedInt, ExtendedInt]:
    """(dim, depth) at the irrelevant ideal, memoized on the presentation."""
    key = _module_key(M)
    hit = _GRADED_CACHE.get(key)
    if hit is None:
        if M.is_zero():
            hit = (MINUS_INF, INF)
        else:
            hit = (module_dimension(M), module_depth_graded(M))
        _GRADED_CACHE[key] = hit
    return hit


def _support_at_monomial_prime(N: PresentedModule, prime: MonomialPrime) -> bool:
    """Whether N localized at ``prime`` is nonzero: the presentation has rank
    below rank F0 over the residue field of ``prime``."""
    ring = N.ring
    r = N.target.rank
    if r == 0:
        return False
    cols = N.presentation.columns
    if not cols:
        return True
    S = prime.variables
    if monomial_multidegrees(N) is not None:
        # every minor is a single term, so rank over k(x) is the rank at x = 1
        F = ring.field
        mat = [[0] * len(cols) for _ in range(r)]
        for j, col in enumerate(cols):
            for (i, e), c in col.items():
                if not any(e[v] for v in S):
                    mat[i][j] = F(mat[i][j] + c)
        return _rank_numeric(mat, F) < r
    vals = {v: 0 for v in S}
    mat = [[f.substitute(vals) for f in row] for row in N.presentation.matrix]
    return rank_over_fraction_field(mat) < r


def _localization_profile(M: PresentedModule, prime: MonomialPrime) -> LocalProfile:
    h = prime.height
    if h == 0:
        if _support_at_monomial_prime(M, prime):
            return LocalProfile.inside(prime, 0, 0, 0)
        return LocalProfile.outside(prime, 0)
    N = localize_at_monomial_prime(M, prime)
    dim, depth = graded_dim_depth(N)
    if dim == MINUS_INF:
        return LocalProfile.outside(prime, h)
    return LocalProfile.inside(prime, h, dim, depth)


def ext_support_indices(M: PresentedModule, prime: MonomialPrime | Ideal) -> list[int]:
    """{i : prime lies in the support of Ext^i(M, R)}."""
    out = []
    for i, E in enumerate(ext_modules(M)):
        if E.target.rank == 0:
            continue
        if isinstance(prime, MonomialPrime):
            inside = _support_at_monomial_prime(E, prime)
        else:
            F = fitting_support_ideal(E)
            gb = prime.groebner()
            inside = all(gb.contains(f) for f in F.generators)
        if inside:
            out.append(i)
    return out


def _ext_pattern_profile(M: PresentedModule, prime) -> LocalProfile:
    ring = M.ring
    if isinstance(prime, MonomialPrime):
        h = prime.height
    else:
        h = ring.nvars - krull_dimension_ideal(prime)
    idx = ext_support_indices(M, prime)
    if not idx:
        return LocalProfile.outside(prime, h)
    c, s = min(idx), max(idx)
    return LocalProfile.inside(prime, h, h - c, h - s)


def local_profile_at_prime(M: PresentedModule, prime: MonomialPrime | Ideal,
                           method: str = "auto") -> LocalProfile:
    """dim, depth and defect of M localized at ``prime``.

    ``method`` is ``"localization"`` (monomial modules at monomial primes),
    ``"ext"`` (supports of Ext^i(M, R)) or ``"auto"``.  A general ``Ideal`` must
    be prime; only properness is checked.
    """
    if isinstance(prime, Ideal):
        if prime.ring != M.ring:
            raise ValueError("prime and module over different rings")
        if prime.is_unit():
            raise ValueError("the unit ideal is not prime")
        mp = as_monomial_prime(prime)
        if mp is not None:
            prime = mp
    if method == "auto":
        method = "localization" if isinstance(prime, MonomialPrime) and is_monomial_module(M) else "ext"
    if method == "localization":
        if not isinstance(prime, MonomialPrime):
            raise ValueError("localization path needs a monomial prime")
        return _localization_profile(M, prime)
    if method == "ext":
        return _ext_pattern_profile(M, prime)
    raise ValueError(f"unknown method {method!r}")


def is_regular_element(x: Polynomial, M: PresentedModule) -> bool:
    """Whether multiplication by ``x`` is injective on M."""
    if not x:
        raise ValueError("x must be nonzero")
    if x.ring != M.ring:
        raise ValueError("element and module over different rings")
    T = M.target
    r = T.rank
    if r == 0:
        return True
    cols = [{(i, e): c for e, c in x._dict.items()} for i in range(r)]
    rels = list(M.presentation.columns)
    syz = syzygy_vectors(cols + rels, T)
    gb = M.relation_gb
    for s in syz:
        v = {(c, e): a for (c, e), a in s.items() if c < r}
        if v and not gb.contains(v):
            return False
    return True
