"""Named example modules, seeded random monomial modules and the statement
verifier that runs them through the deciders."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .groebner import Ideal, ideal_combine
from .invariants import (
    cm_defect,
    grade_of_ideal_on_module,
    is_regular_element,
    module_dimension,
)
from .poly import QQ, PolyRing
from .resolution import PresentedModule
from .serre import PropertyQuery, check_condition, exhaustive_monomial_report


@dataclass(frozen=True)
class CorpusSpec:
    seed: int
    variable_count: int
    max_degree: int = 4
    generator_count: int = 6
    instance_count: int = 100

    def __post_init__(self):
        if not 2 <= self.variable_count <= 6:
            raise ValueError("variable_count must lie in 2..6")
        if not 1 <= self.max_degree <= 5:
            raise ValueError("max_degree must lie in 1..5")
        if not 1 <= self.generator_count <= 8:
            raise ValueError("generator_count must lie in 1..8")
        if self.instance_count < 0:
            raise ValueError("instance_count must be natural")


@dataclass(frozen=True)
class Bounds:
    n_max: int = 6
    l_max: int = 4


@dataclass
class VerificationReport:
    statement_id: str
    description: str
    instances_checked: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return asdict(self) | {"passed": self.passed}


STATEMENTS = {
    "a": "cmd(M) <= l iff (C_n^l) for every n",
    "b": "(C_n^l) iff cmd(M_p) <= l whenever depth(M_p) <= n-l-1",
    "c": "(C_n^l) implies (C_{n-1}^l) and (C_n^{l+1})",
    "d": "(S_n^l) implies (C_n^l); (S_n^l) equals (S_{n-l}); (C_n^0) equals (S_n); (C_n^1) equals (C_n)",
    "e": "(S_n) for all n iff CM; (S_n) iff M_p CM whenever depth(M_p) < n",
    "f": "x regular: cmd(M/xM) = cmd(M) and (C_n^l) for M gives (C_{n-1}^l) for M/xM",
    "g": "x regular in the irrelevant ideal: (C_n^l) for M/xM gives (C_n^l) for M",
    "h": "cmd and (C_n^l) unchanged by adjoining a polynomial variable",
    "i": "(C_n^l) iff grade(p, M) >= min(n, dim M_p) - l on the support",
}


# ---------------------------------------------------------------------------
# named examples


def example_excm(d: int, r: int, field=QQ) -> PresentedModule:
    """S/I with I = (X0) ∩ (X0,...,Xr)^(r+1) in k[X0..Xr, T1..Td]."""
    if d < 0 or r < 1:
        raise ValueError("need d >= 0 and r >= 1")
    if d + r + 1 > 8:
        raise ValueError("d + r + 1 must be at most 8")
    names = [f"X{i}" for i in range(r + 1)] + [f"T{i}" for i in range(1, d + 1)]
    ring = PolyRing(names, field)
    xs = ring.gens()[: r + 1]
    I = ideal_combine(Ideal([xs[0]], ring), Ideal(xs, ring) ** (r + 1), "intersection")
    return PresentedModule.cyclic(I, label=f"excm(d={d},r={r})")


def example_matsumura(field=QQ) -> PresentedModule:
    """k[X,Y,Z]/((X,Y,Z)^2 ∩ (Z))."""
    ring = PolyRing(("X", "Y", "Z"), field)
    X, Y, Z = ring.gens()
    I = ideal_combine(Ideal([X, Y, Z], ring), None, "power", 2)
    I = ideal_combine(I, Ideal([Z], ring), "intersection")
    return PresentedModule.cyclic(I, label="matsumura")


# ---------------------------------------------------------------------------
# random corpus


def corpus_ring(m: int, field=QQ) -> PolyRing:
    return PolyRing([f"x{i}" for i in range(1, m + 1)], field)


def random_monomial_generators(spec: CorpusSpec, index: int) -> list[tuple[int, ...]]:
    if not 0 <= index < spec.instance_count:
        raise ValueError("index out of range")
    rng = random.Random(f"{spec.seed}:{index}")
    m = spec.variable_count
    k = rng.randint((spec.generator_count + 1) // 2, spec.generator_count)
    gens = []
    for _ in range(k):
        deg = rng.randint(1, spec.max_degree)
        # a small support keeps the quotient from being zero-dimensional
        support = rng.sample(range(m), rng.randint(1, min(m, deg)))
        e = [0] * m
        for v in support:
            e[v] = 1
        for _ in range(deg - len(support)):
            e[rng.choice(support)] += 1
        gens.append(tuple(e))
    gens = sorted(set(gens), key=lambda e: (sum(e), e))
    out = []
    for e in gens:
        if not any(all(a <= b for a, b in zip(g, e)) for g in out):
            out.append(e)
    return out


def random_monomial_module(spec: CorpusSpec, index: int, field=QQ) -> PresentedModule:
    """Cyclic R/J, J generated by pairwise indivisible monomials."""
    ring = corpus_ring(spec.variable_count, field)
    gens = random_monomial_generators(spec, index)
    J = Ideal.from_monomials(ring, gens)
    return PresentedModule.cyclic(J, label=f"random(seed={spec.seed},m={spec.variable_count},i={index})")


def corpus_modules(spec: CorpusSpec) -> list[PresentedModule]:
    return [random_monomial_module(spec, i) for i in range(spec.instance_count)]


# ---------------------------------------------------------------------------
# module constructions used by the reports


def monomial_ideal_of(M: PresentedModule) -> list[tuple[int, ...]]:
    if not M.is_monomial_cyclic():
        raise ValueError("expected a cyclic monomial module")
    return [next(iter(c))[1] for c in M.presentation.columns]


def adjoin_variable(M: PresentedModule, name: str) -> PresentedModule:
    """M[y] = R[y]/J R[y] for cyclic monomial M = R/J."""
    ring = M.ring
    big = ring.with_variables(list(ring.variables) + [name])
    gens = [e + (0,) for e in monomial_ideal_of(M)]
    return PresentedModule.cyclic(Ideal.from_monomials(big, gens), label=f"{M.label}[{name}]")


def mod_variable(M: PresentedModule, i: int) -> PresentedModule:
    """M/x_i M for cyclic monomial M."""
    ring = M.ring
    e = tuple(1 if k == i else 0 for k in range(ring.nvars))
    gens = monomial_ideal_of(M) + [e]
    return PresentedModule.cyclic(Ideal.from_monomials(ring, gens), label=f"{M.label}/{ring.variables[i]}")


def identify_variables(M: PresentedModule, i: int, j: int) -> PresentedModule:
    """M/(x_i - x_j)M as a module over the ring without x_i (x_i set to x_j)."""
    ring = M.ring
    keep = [k for k in range(ring.nvars) if k != i]
    small = ring.with_variables(ring.variables[k] for k in keep)
    gens = []
    for e in monomial_ideal_of(M):
        f = list(e)
        f[j] += f[i]
        gens.append(tuple(f[k] for k in keep))
    return PresentedModule.cyclic(Ideal.from_monomials(small, gens),
                                  label=f"{M.label}/({ring.variables[i]}-{ring.variables[j]})")


# ---------------------------------------------------------------------------
# verification


def _profile_rows(M: PresentedModule) -> list:
    ring = M.ring
    rows = []
    for p in exhaustive_monomial_report(M):
        if p.in_support:
            rows.append([p.prime.label(ring), p.height, p.dim_local, p.depth_local])
    return rows


def _yes(M, n, l) -> bool:
    return check_condition(M, PropertyQuery.Cnl(n, l)).answer == "yes"


class _Collector:
    def __init__(self, M):
        self.M = M
        self.bad: dict[str, list] = {k: [] for k in STATEMENTS}
        self.checked: dict[str, int] = {k: 0 for k in STATEMENTS}

    def mark(self, sid):
        self.checked[sid] = 1

    def fail(self, sid, **params):
        self.bad[sid].append({"module": self.M.label, "params": params, "profiles": _profile_rows(self.M)})


def _regular_elements(M: PresentedModule):
    """Verified regular elements: variables, then the first difference x_i - x_j."""
    ring = M.ring
    xs = ring.gens()
    out = []
    for i in range(ring.nvars):
        if is_regular_element(xs[i], M):
            out.append(("var", i, None))
    for i in range(ring.nvars):
        for j in range(ring.nvars):
            if i != j and is_regular_element(xs[i] - xs[j], M):
                out.append(("diff", i, j))
                return out
    return out


def verify_module(M: PresentedModule, bounds: Bounds = Bounds(), statements: Iterable[str] = STATEMENTS,
                  ) -> tuple[dict, dict]:
    """Run the requested statements on one cyclic monomial module.

    Returns ``(checked, counterexamples)`` keyed by statement id.
    """
    statements = set(statements)
    C = _Collector(M)
    ring = M.ring
    m = ring.nvars
    prof = exhaustive_monomial_report(M)
    d = module_dimension(M)
    dd = max(d, 0)
    cmd = cm_defect(M)
    N = min(bounds.n_max, dd + 2)
    L = min(bounds.l_max, dd + 1)

    if "a" in statements:
        C.mark("a")
        for l in range(dd + 2):
            all_n = all(_yes(M, n, l) for n in range(dd + 3))
            if (cmd <= l) != all_n:
                C.fail("a", l=l, cmd=cmd)

    if "b" in statements:
        C.mark("b")
        for n in range(N + 1):
            for l in range(L + 1):
                rhs = all(p.cmd_local <= l for p in prof if p.in_support and p.depth_local <= n - l - 1)
                if _yes(M, n, l) != rhs:
                    C.fail("b", n=n, l=l)

    if "c" in statements:
        C.mark("c")
        for n in range(N + 1):
            for l in range(L + 1):
                if _yes(M, n, l):
                    if n >= 1 and not _yes(M, n - 1, l):
                        C.fail("c", n=n, l=l, fails="n-1")
                    if not _yes(M, n, l + 1):
                        C.fail("c", n=n, l=l, fails="l+1")

    if "d" in statements:
        C.mark("d")
        for n in range(N + 1):
            sn = check_condition(M, PropertyQuery.Sn(n)).answer
            if check_condition(M, PropertyQuery.Cnl(n, 0)).answer != sn:
                C.fail("d", n=n, fails="C_n^0 vs S_n")
            if check_condition(M, PropertyQuery.Cnl(n, 1)).answer != check_condition(M, PropertyQuery.Cn(n)).answer:
                C.fail("d", n=n, fails="C_n^1 vs C_n")
            for l in range(L + 1):
                snl = check_condition(M, PropertyQuery.Snl(n, l)).answer
                if snl == "yes" and not _yes(M, n, l):
                    C.fail("d", n=n, l=l, fails="S_n^l without C_n^l")
                if n >= l and snl != check_condition(M, PropertyQuery.Sn(n - l)).answer:
                    C.fail("d", n=n, l=l, fails="S_n^l vs S_{n-l}")

    if "e" in statements:
        C.mark("e")
        every = all(check_condition(M, PropertyQuery.Sn(n)).answer == "yes" for n in range(dd + 3))
        if every != (cmd == 0):
            C.fail("e", fails="S_n for all n vs CM", cmd=cmd)
        for n in range(N + 1):
            rhs = all(p.cmd_local == 0 for p in prof if p.in_support and p.depth_local < n)
            if (check_condition(M, PropertyQuery.Sn(n)).answer == "yes") != rhs:
                C.fail("e", n=n, fails="S_n vs CM at low depth")

    if "f" in statements or "g" in statements:
        pairs = []
        # a fresh variable is regular on M[t] with quotient M[t]/tM[t]
        Mt = adjoin_variable(M, "t")
        pairs.append(("t", Mt, mod_variable(Mt, m), None))
        for kind, i, j in _regular_elements(M):
            if kind == "var":
                pairs.append((ring.variables[i], M, mod_variable(M, i), None))
            else:
                x = ring.gens()[i] - ring.gens()[j]
                pairs.append((f"{ring.variables[i]}-{ring.variables[j]}", M, identify_variables(M, i, j),
                              M.quotient_by(x)))
        for name, A, Q, Qdirect in pairs:
            if "f" in statements:
                C.mark("f")
                ca, cq = cm_defect(A), cm_defect(Q)
                if ca != cq:
                    C.fail("f", x=name, cmd=ca, cmd_quotient=cq)
                if Qdirect is not None and cm_defect(Qdirect) != cq:
                    C.fail("f", x=name, fails="direct quotient cmd differs", cmd_quotient=cq)
                for n in range(1, N + 1):
                    for l in range(L + 1):
                        if _yes(A, n, l) and not _yes(Q, n - 1, l):
                            C.fail("f", x=name, n=n, l=l)
            if "g" in statements:
                C.mark("g")
                for n in range(N + 1):
                    for l in range(L + 1):
                        if _yes(Q, n, l) and not _yes(A, n, l):
                            C.fail("g", x=name, n=n, l=l)

    if "h" in statements:
        C.mark("h")
        My = adjoin_variable(M, "y")
        if cm_defect(My) != cmd:
            C.fail("h", cmd=cmd, cmd_adjoined=cm_defect(My))
        for n in range(N + 1):
            for l in range(L + 1):
                if _yes(M, n, l) != _yes(My, n, l):
                    C.fail("h", n=n, l=l)

    if "i" in statements:
        C.mark("i")
        grades = {}
        for p in prof:
            if p.in_support and p.height > 0:
                grades[p.prime] = grade_of_ideal_on_module(p.prime.ideal(ring), M)
            elif p.in_support:
                grades[p.prime] = 0
        for n in range(N + 1):
            for l in range(L + 1):
                rhs = all(grades[p.prime] >= min(n, p.dim_local) - l for p in prof if p.in_support)
                if _yes(M, n, l) != rhs:
                    C.fail("i", n=n, l=l)

    return C.checked, C.bad


def _verify_index(args):
    spec, index, bounds, statements = args
    M = random_monomial_module(spec, index)
    return verify_module(M, bounds, statements)


def verify_modules(modules: Sequence[PresentedModule], bounds: Bounds = Bounds(),
                   statements: Iterable[str] = STATEMENTS) -> list[VerificationReport]:
    statements = [s for s in STATEMENTS if s in set(statements)]
    return _merge([verify_module(M, bounds, statements) for M in modules], statements)


def _merge(results, statements) -> list[VerificationReport]:
    reports = {s: VerificationReport(s, STATEMENTS[s]) for s in statements}
    for checked, bad in results:
        for s in statements:
            reports[s].instances_checked += checked[s]
            reports[s].counterexamples.extend(bad[s])
    return [reports[s] for s in statements]


def verify_statements(spec: CorpusSpec, bounds: Bounds = Bounds(), threads: int = 1,
                            statements: Iterable[str] = STATEMENTS) -> list[VerificationReport]:
    """Run statements (a)-(i) over the random corpus of ``spec``.

    Instances are independent; with ``threads > 1`` they run in worker
    processes and results are merged in instance order.
    """
    statements = [s for s in STATEMENTS if s in set(statements)]
    jobs = [(spec, i, bounds, statements) for i in range(spec.instance_count)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_verify_index, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = [_verify_index(j) for j in jobs]
    return _merge(results, statements)
