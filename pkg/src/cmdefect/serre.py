"""Deciders for Serre-type depth conditions on graded modules.

Every condition has the shape ``depth M_p >= min(dim M_p, a) - b`` for all
primes p:

=========  =============  =====
kind        a              b
=========  =============  =====
Sn          n              0
Cn          n              1
Cnl         n              l
Snl         n - l          0     (vacuous when n < l)
cmd_le_l    inf            l
almostCM    inf            1
=========  =============  =====

Monomial modules are decided exactly over the 2^m monomial primes.  Other
modules go through the Ext-support test: the condition fails iff for some
``i > j + b`` with Ext^i(M,R) and Ext^j(M,R) both nonzero, the ideal
``Fitt0(Ext^i) + Fitt0(Ext^j)`` has a prime of height below ``i + a - b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .groebner import MINUS_INF, Ideal, krull_dimension_ideal
from .invariants import (
    INF,
    LocalProfile,
    MonomialPrime,
    NotMonomialError,
    all_monomial_primes,
    as_monomial_prime,
    cm_defect,
    ext_modules,
    fitting_support_ideal,
    is_monomial_module,
    local_profile_at_prime,
    module_dimension,
)
from .resolution import PresentedModule

KINDS = ("Sn", "Cn", "Cnl", "Snl", "almostCM", "cmd_le_l")


@dataclass(frozen=True)
class PropertyQuery:
    kind: str
    n: int | None = None
    l: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown property {self.kind!r}")
        needs_n = self.kind in ("Sn", "Cn", "Cnl", "Snl")
        needs_l = self.kind in ("Cnl", "Snl", "cmd_le_l")
        if needs_n and self.n is None:
            raise ValueError(f"{self.kind} needs n")
        if needs_l and self.l is None:
            raise ValueError(f"{self.kind} needs l")
        for v in (self.n, self.l):
            if v is not None and (not isinstance(v, int) or v < 0):
                raise ValueError("n and l must be natural numbers")

    @classmethod
    def Sn(cls, n):
        return cls("Sn", n)

    @classmethod
    def Cn(cls, n):
        return cls("Cn", n)

    @classmethod
    def Cnl(cls, n, l):
        return cls("Cnl", n, l)

    @classmethod
    def Snl(cls, n, l):
        return cls("Snl", n, l)

    @classmethod
    def almostCM(cls):
        return cls("almostCM")

    @classmethod
    def cmd_le_l(cls, l):
        return cls("cmd_le_l", None, l)

    def bounds(self) -> tuple[float, int] | None:
        """``(a, b)`` of the inequality, or None when the condition is vacuous."""
        k = self.kind
        if k == "Sn":
            return self.n, 0
        if k == "Cn":
            return self.n, 1
        if k == "Cnl":
            return self.n, self.l
        if k == "Snl":
            if self.n < self.l:
                return None
            return self.n - self.l, 0
        if k == "almostCM":
            return INF, 1
        return INF, self.l

    @property
    def effective_l(self) -> int:
        b = self.bounds()
        return 0 if b is None else b[1]

    def __str__(self):
        parts = [self.kind]
        if self.n is not None:
            parts.append(f"n={self.n}")
        if self.l is not None:
            parts.append(f"l={self.l}")
        return " ".join(parts)


def profile_satisfies(p: LocalProfile, a, b) -> bool:
    if not p.in_support:
        return True
    return p.depth_local >= min(p.dim_local, a) - b


@dataclass
class PropertyVerdict:
    query: PropertyQuery
    answer: str  # "yes" | "no" | "unknown"
    tag: str | None = None
    certificate: object = None  # MonomialPrime, Ideal or None
    profile: LocalProfile | None = None
    note: str = ""

    def __bool__(self):
        return self.answer == "yes"

    def record(self, ring) -> dict:
        """Stable report record."""
        cert = self.certificate
        if isinstance(cert, MonomialPrime):
            cert = cert.label(ring)
        elif cert is not None:
            cert = str(cert)
        prof = None
        if self.profile is not None:
            p = self.profile
            prof = {"height": p.height, "dim": p.dim_local, "depth": p.depth_local,
                    "cmd": p.cmd_local, "in_support": p.in_support}
        return {
            "property": self.query.kind,
            "n": self.query.n,
            "l": self.query.l,
            "answer": self.answer,
            "certificate_prime": cert,
            "profile": prof,
            "justification": self.tag if not self.note else f"{self.tag}: {self.note}",
        }


# ---------------------------------------------------------------------------
# exhaustive monomial checking


def exhaustive_monomial_report(M: PresentedModule) -> list[LocalProfile]:
    """One local profile per monomial prime, by size then lexicographically."""
    if not is_monomial_module(M):
        raise NotMonomialError("exhaustive report needs a monomial module")
    cache = M.__dict__.setdefault("_profile_cache", None)
    if cache is None:
        cache = [local_profile_at_prime(M, P, "localization") for P in all_monomial_primes(M.ring.nvars)]
        M.__dict__["_profile_cache"] = cache
    return cache


def _check_profiles(query: PropertyQuery, profiles) -> PropertyVerdict:
    ab = query.bounds()
    if ab is None:
        return PropertyVerdict(query, "yes", "exhaustive", note="vacuous since n < l")
    a, b = ab
    # report the largest violating prime
    for p in reversed(profiles):
        if not profile_satisfies(p, a, b):
            return PropertyVerdict(query, "no", "exhaustive", p.prime, p)
    return PropertyVerdict(query, "yes", "exhaustive")


def minimal_defect_level(M: PresentedModule, n: int) -> int:
    """Least l with (C_n^l)."""
    prof = exhaustive_monomial_report(M)
    return max((max(0, min(p.dim_local, n) - p.depth_local) for p in prof if p.in_support), default=0)


# ---------------------------------------------------------------------------
# Ext-support data for the general path


@dataclass
class ExtSupportData:
    """Nonzero Ext^i(M, R) indices with their Fitting ideals."""

    indices: list[int]
    fitting: dict = field(default_factory=dict)
    _sum_dims: dict = field(default_factory=dict)

    def sum_ideal(self, i, j) -> Ideal:
        return self.fitting[i] + self.fitting[j]

    def sum_dimension(self, i, j):
        key = (min(i, j), max(i, j))
        if key not in self._sum_dims:
            self._sum_dims[key] = krull_dimension_ideal(self.sum_ideal(i, j))
        return self._sum_dims[key]


def ext_support_data(M: PresentedModule) -> ExtSupportData:
    hit = M.__dict__.get("_ext_support")
    if hit is None:
        idx, fit = [], {}
        for i, E in enumerate(ext_modules(M)):
            if E.is_zero():
                continue
            idx.append(i)
            fit[i] = fitting_support_ideal(E)
        hit = M.__dict__["_ext_support"] = ExtSupportData(idx, fit)
    return hit


def _violating_pair(M: PresentedModule, a, b):
    """A pair (i, j) witnessing failure of the condition, or None."""
    data = ext_support_data(M)
    m = M.ring.nvars
    for i in reversed(data.indices):
        for j in data.indices:
            if i <= j + b:
                continue
            d = data.sum_dimension(i, j)
            if d == MINUS_INF:
                continue
            if a == INF or d > m - i - a + b:
                return i, j
    return None


def witness_set(M: PresentedModule) -> list[Ideal]:
    """The ideals Fitt0(Ext^i) + Fitt0(Ext^j), i <= j, both Ext nonzero, and
    for monomial M the minimal monomial primes over each of them."""
    data = ext_support_data(M)
    ring = M.ring
    out: list[Ideal] = []
    seen = set()
    sums = [data.fitting[i] for i in data.indices] + \
        [data.sum_ideal(i, j) for i, j in combinations(data.indices, 2)]
    out.extend(sums)
    if is_monomial_module(M):
        for I in sums:
            if I.is_unit():
                continue
            for P in minimal_monomial_primes(ring.nvars, I.minimal_monomial_generators()):
                if P not in seen:
                    seen.add(P)
                    out.append(P.ideal(ring))
    return out


def minimal_monomial_primes(nvars: int, monos) -> list[MonomialPrime]:
    """Minimal primes of a monomial ideal: minimal variable covers."""
    supports = [frozenset(i for i, x in enumerate(e) if x) for e in monos]
    if any(not s for s in supports):
        return []
    covers = []
    for k in range(nvars + 1):
        for S in combinations(range(nvars), k):
            s = set(S)
            if all(t & s for t in supports) and not any(c <= s for c in covers):
                covers.append(frozenset(S))
    return [MonomialPrime(c) for c in covers]


# ---------------------------------------------------------------------------
# classical depth criteria through Ext dimensions


def schenzel_classical(M: PresentedModule, k: int) -> bool:
    """``dim Ext^i(M,R) <= m - i - k`` for all ``i > m - dim M``.

    Sufficient for (S_k); necessary only for equidimensional modules.
    """
    m = M.ring.nvars
    if M.is_zero():
        return True
    d = module_dimension(M)
    for i, E in enumerate(ext_modules(M)):
        if i > m - d and not E.is_zero() and module_dimension(E) > m - i - k:
            return False
    return True


def schenzel_exact(M: PresentedModule, k: int) -> bool:
    """(S_k) decided through pairwise intersections of Ext supports."""
    return _violating_pair(M, k, 0) is None


# ---------------------------------------------------------------------------
# top-level decision


def _general_check(M: PresentedModule, query: PropertyQuery, strategy: str) -> PropertyVerdict:
    ab = query.bounds()
    if ab is None:
        return PropertyVerdict(query, "yes", "exhaustive", note="vacuous since n < l")
    a, b = ab
    if cm_defect(M) <= b:
        return PropertyVerdict(query, "yes", "cmd_bound")
    if query.kind in ("Cnl", "Cn", "Sn") and a != INF and a - b >= 0 and schenzel_classical(M, a - b):
        return PropertyVerdict(query, "yes", "snl_implies_cnl",
                               note=f"S_{a - b} holds by the Ext dimension test")
    ring = M.ring
    # witnesses among monomial primes (profiles through Ext supports)
    data = ext_support_data(M)
    cands: list = [MonomialPrime.irrelevant(ring)]
    for I in (data.sum_ideal(i, j) for i in data.indices for j in data.indices if i > j):
        P = as_monomial_prime(I) if not I.is_unit() else None
        if P is not None and P not in cands:
            cands.append(P)
    if strategy == "exact":
        cands.extend(P for P in reversed(all_monomial_primes(ring.nvars)) if P not in cands)
    for P in cands:
        prof = local_profile_at_prime(M, P, "ext")
        if not profile_satisfies(prof, a, b):
            return PropertyVerdict(query, "no", "witness", P, prof)
    if strategy == "exact":
        pair = _violating_pair(M, a, b)
        if pair is None:
            return PropertyVerdict(query, "yes", "ext_support")
        i, j = pair
        return PropertyVerdict(query, "no", "ext_support", data.sum_ideal(i, j), None,
                               note=f"some minimal prime of Fitt0(Ext^{i}) + Fitt0(Ext^{j}) violates")
    return PropertyVerdict(query, "unknown", None, note="no certificate found")


def check_condition(M: PresentedModule, query: PropertyQuery, method: str = "auto",
                    strategy: str = "exact") -> PropertyVerdict:
    """Decide ``query`` for M.

    ``method="exhaustive"`` sweeps monomial primes (monomial modules only),
    ``"general"`` uses Ext supports; ``"auto"`` picks exhaustive when possible.
    On the general path ``strategy="sufficient"`` uses only the cmd bound, the
    classical Ext dimension test and monomial witnesses, and may answer
    ``unknown``; ``"exact"`` always decides.
    """
    if method == "auto":
        method = "exhaustive" if is_monomial_module(M) else "general"
    if method == "exhaustive":
        return _check_profiles(query, exhaustive_monomial_report(M))
    if method == "general":
        if strategy not in ("exact", "sufficient"):
            raise ValueError(f"unknown strategy {strategy!r}")
        return _general_check(M, query, strategy)
    raise ValueError(f"unknown method {method!r}")


def almost_cm(M: PresentedModule) -> bool:
    return cm_defect(M) <= 1


def cmd_from_profiles(profiles) -> int:
    return max((p.cmd_local for p in profiles if p.in_support), default=0)
