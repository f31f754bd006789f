"""Graded free modules, presentations, syzygies and minimal free resolutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .groebner import (
    MINUS_INF,
    GBResult,
    Ideal,
    ModuleOrder,
    Vector,
    axpy,
    buchberger,
    is_homogeneous_vector,
    monomial_dimension,
    schreyer_order,
    top_order,
)
from .poly import Polynomial, PolyRing


@dataclass(frozen=True)
class GradedFreeModule:
    """``R(t_1) + ... + R(t_r)``; the i-th basis element has degree ``-twists[i]``."""

    ring: PolyRing
    twists: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "twists", tuple(int(t) for t in self.twists))

    @classmethod
    def from_degrees(cls, ring: PolyRing, degrees: Iterable[int]) -> GradedFreeModule:
        return cls(ring, tuple(-d for d in degrees))

    @property
    def rank(self) -> int:
        return len(self.twists)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(-t for t in self.twists)

    def order(self) -> ModuleOrder:
        return top_order(self.ring.order.key, self.degrees)


class ModuleMap:
    """Homogeneous map ``source -> target``; column ``j`` is the image of the j-th
    basis element of ``source`` as a vector ``{(row, exponents): coeff}``."""

    def __init__(self, source: GradedFreeModule, target: GradedFreeModule,
                 columns: Sequence[Vector], check: bool = True):
        if source.ring != target.ring:
            raise ValueError("source and target over different rings")
        if len(columns) != source.rank:
            raise ValueError("column count differs from source rank")
        self.source = source
        self.target = target
        self.columns: tuple[Vector, ...] = tuple(columns)
        if check:
            tdeg, sdeg = target.degrees, source.degrees
            for j, col in enumerate(self.columns):
                for (r, e) in col:
                    if not 0 <= r < target.rank:
                        raise ValueError(f"row index {r} out of range")
                    if sum(e) + tdeg[r] != sdeg[j]:
                        raise ValueError(f"entry ({r},{j}) is not homogeneous of the right degree")

    @property
    def ring(self) -> PolyRing:
        return self.target.ring

    @classmethod
    def from_matrix(cls, target: GradedFreeModule, rows: Sequence[Sequence[Polynomial]]) -> ModuleMap:
        """Build from a ``target.rank x k`` matrix, inferring source degrees."""
        ring = target.ring
        ncols = len(rows[0]) if rows else 0
        if len(rows) != target.rank or any(len(r) != ncols for r in rows):
            raise ValueError("matrix shape does not match target rank")
        cols = []
        degs = []
        for j in range(ncols):
            col = {}
            for i in range(target.rank):
                f = rows[i][j]
                if f.ring != ring:
                    raise ValueError("matrix entry in a different ring")
                for e, c in f._dict.items():
                    col[(i, e)] = c
            if col and not is_homogeneous_vector(col, target.degrees):
                raise ValueError(f"column {j} is not homogeneous")
            cols.append(col)
            degs.append(_vec_degree(col, target.degrees) if col else 0)
        return cls(GradedFreeModule.from_degrees(ring, degs), target, cols)

    def entry(self, i: int, j: int) -> Polynomial:
        return Polynomial._from_dict(self.ring, {e: c for (r, e), c in self.columns[j].items() if r == i})

    @property
    def matrix(self) -> list[list[Polynomial]]:
        return [[self.entry(i, j) for j in range(self.source.rank)] for i in range(self.target.rank)]

    def apply(self, v: Vector) -> Vector:
        """Image of a source vector."""
        p = self.ring.field.characteristic
        out: Vector = {}
        for (j, e), c in v.items():
            axpy(out, c, e, self.columns[j], p)
        return out

    def compose(self, other: ModuleMap) -> ModuleMap:
        """``self o other``."""
        return ModuleMap(other.source, self.target, [self.apply(c) for c in other.columns], check=False)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def has_unit_entry(self) -> bool:
        zero = (0,) * self.ring.nvars
        return any(e == zero for col in self.columns for (_, e) in col)

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(f) for f in row) + "]" for row in self.matrix) + "]"


def _vec_degree(v: Vector, degrees: Sequence[int]) -> int:
    c, e = next(iter(v))
    return sum(e) + degrees[c]


# ---------------------------------------------------------------------------
# syzygies and pruning


def syzygy_vectors(columns: Sequence[Vector], target: GradedFreeModule,
                   order: ModuleOrder | None = None, gb: bool = False):
    """Generators of the syzygies of ``columns`` (vectors in ``target``)."""
    ring = target.ring
    order = order or target.order()
    res = buchberger(list(columns), order, ring.field, ring.nvars, degrees=target.degrees,
                     syzygies=True, product_criterion=target.rank == 1)
    return (res.syzygies, res) if gb else res.syzygies


def syzygy_module(phi: ModuleMap, order: ModuleOrder | None = None) -> ModuleMap:
    """Map ``G -> source(phi)`` whose image is ``ker(phi)``, via a module Groebner
    basis of the columns (Schreyer's construction)."""
    syz = [s for s in syzygy_vectors(phi.columns, phi.target, order) if s]
    degs = [_vec_degree(s, phi.source.degrees) for s in syz]
    G = GradedFreeModule.from_degrees(phi.ring, degs)
    return ModuleMap(G, phi.source, syz, check=False)


def _row_entry(col: Vector, r: int) -> dict:
    return {e: c for (rr, e), c in col.items() if rr == r}


def _delete_row(col: Vector, r: int) -> Vector:
    return {((rr - 1 if rr > r else rr), e): c for (rr, e), c in col.items() if rr != r}


def _eliminate(cols: list[Vector], pivot: int, r: int, u, field) -> list[Vector]:
    """Clear row ``r`` in every column but ``pivot`` using the unit ``u`` at
    (r, pivot); return the columns without ``pivot`` and without row ``r``."""
    p = field.characteristic
    pc = cols[pivot]
    inv = field.div(1, u)
    out = []
    for j, col in enumerate(cols):
        if j == pivot:
            continue
        a = _row_entry(col, r)
        if a:
            col = dict(col)
            for e, c in a.items():
                axpy(col, field(-c * inv), e, pc, p)
        out.append(_delete_row(col, r))
    return out


def prune_presentation(target_degrees: Sequence[int], cols: Sequence[Vector], field, nvars: int):
    """Remove unit entries from a presentation matrix (cancelling a generator
    against a relation each time).  Returns ``(degrees, columns)`` with no zero
    columns and no unit entries."""
    degrees = list(target_degrees)
    cols = [dict(c) for c in cols if c]
    zero = (0,) * nvars
    while True:
        found = None
        for j, col in enumerate(cols):
            for (r, e), c in col.items():
                if e == zero:
                    found = (j, r, c)
                    break
            if found:
                break
        if not found:
            break
        j, r, u = found
        cols = [c for c in _eliminate(cols, j, r, u, field) if c]
        del degrees[r]
    return degrees, cols


def prune_generators(phi_cols: list[Vector], phi_degs: list[int], syz: list[Vector], field, nvars: int):
    """Drop redundant columns of ``phi`` using unit entries of the syzygy
    generators ``syz``; return (phi columns, their degrees, updated syzygies)."""
    phi_cols = list(phi_cols)
    phi_degs = list(phi_degs)
    syz = [dict(s) for s in syz if s]
    zero = (0,) * nvars
    while True:
        found = None
        for j, col in enumerate(syz):
            for (r, e), c in col.items():
                if e == zero:
                    found = (j, r, c)
                    break
            if found:
                break
        if not found:
            break
        j, r, u = found
        syz = [c for c in _eliminate(syz, j, r, u, field) if c]
        del phi_cols[r]
        del phi_degs[r]
    return phi_cols, phi_degs, syz


# ---------------------------------------------------------------------------
# presented modules


class PresentedModule:
    """The cokernel of a homogeneous map of graded free modules."""

    def __init__(self, presentation: ModuleMap, label: str | None = None):
        self.presentation = presentation
        self.label = label

    @property
    def ring(self) -> PolyRing:
        return self.presentation.ring

    @property
    def target(self) -> GradedFreeModule:
        return self.presentation.target

    @classmethod
    def cyclic(cls, ideal: Ideal, label: str | None = None) -> PresentedModule:
        """R/J."""
        ring = ideal.ring
        F0 = GradedFreeModule(ring, (0,))
        if not ideal.is_homogeneous():
            raise ValueError("ideal must be homogeneous")
        phi = ModuleMap.from_matrix(F0, [list(ideal.generators)]) if ideal.generators else \
            ModuleMap(GradedFreeModule(ring, ()), F0, [])
        return cls(phi, label)

    @classmethod
    def free(cls, ring: PolyRing, twists: Sequence[int] = (0,), label: str | None = None) -> PresentedModule:
        F0 = GradedFreeModule(ring, tuple(twists))
        return cls(ModuleMap(GradedFreeModule(ring, ()), F0, []), label)

    @classmethod
    def from_matrix(cls, ring: PolyRing, rows: Sequence[Sequence[Polynomial]],
                    twists: Sequence[int] | None = None, label: str | None = None) -> PresentedModule:
        F0 = GradedFreeModule(ring, tuple(twists) if twists is not None else (0,) * len(rows))
        return cls(ModuleMap.from_matrix(F0, rows), label)

    @classmethod
    def zero(cls, ring: PolyRing, label: str | None = None) -> PresentedModule:
        return cls.free(ring, (), label)

    def quotient_by(self, x: Polynomial, label: str | None = None) -> PresentedModule:
        """M/xM."""
        if not x.is_homogeneous() or not x:
            raise ValueError("x must be a nonzero homogeneous polynomial")
        phi = self.presentation
        cols = list(phi.columns)
        degs = list(phi.source.degrees)
        d = x.total_degree()
        for r in range(self.target.rank):
            cols.append({(r, e): c for e, c in x._dict.items()})
            degs.append(self.target.degrees[r] + d)
        src = GradedFreeModule.from_degrees(self.ring, degs)
        return PresentedModule(ModuleMap(src, self.target, cols, check=False), label)

    def is_monomial_cyclic(self) -> bool:
        return self.target.rank == 1 and all(len(c) == 1 for c in self.presentation.columns)

    @cached_property
    def minimal_presentation(self) -> ModuleMap:
        """Presentation with minimal generators and minimal relations."""
        ring = self.ring
        F = ring.field
        degs, cols = prune_presentation(self.target.degrees, self.presentation.columns, F, ring.nvars)
        F0 = GradedFreeModule.from_degrees(ring, degs)
        if not cols:
            return ModuleMap(GradedFreeModule(ring, ()), F0, [], check=False)
        syz = syzygy_vectors(cols, F0)
        cdeg = [_vec_degree(c, degs) for c in cols]
        cols, cdeg, _ = prune_generators(cols, cdeg, syz, F, ring.nvars)
        return ModuleMap(GradedFreeModule.from_degrees(ring, cdeg), F0, cols, check=False)

    def is_zero(self) -> bool:
        degs, _ = prune_presentation(self.target.degrees, self.presentation.columns,
                                     self.ring.field, self.ring.nvars)
        return not degs

    @cached_property
    def relation_gb(self) -> GBResult:
        """Groebner basis of the relation submodule in the target's graded order."""
        T = self.target
        return buchberger(list(self.presentation.columns), T.order(), self.ring.field,
                          self.ring.nvars, degrees=T.degrees, product_criterion=T.rank == 1)

    def contains_relation(self, v: Vector) -> bool:
        return self.relation_gb.contains(v)

    @cached_property
    def resolution(self) -> Resolution:
        return free_resolution_minimal(self)

    def __str__(self) -> str:
        return f"coker {self.presentation}"

    def __repr__(self) -> str:
        return f"PresentedModule({self.label or str(self)!r})"


# ---------------------------------------------------------------------------
# resolutions


@dataclass
class Resolution:
    modules: list[GradedFreeModule]
    maps: list[ModuleMap]
    minimal: bool = True

    @property
    def length(self) -> int | float:
        if not self.modules or self.modules[0].rank == 0:
            return MINUS_INF
        return len(self.maps)

    def ranks(self) -> list[int]:
        return [F.rank for F in self.modules]

    def is_complex(self) -> bool:
        for a, b in zip(self.maps, self.maps[1:]):
            if not a.compose(b).is_zero():
                return False
        return True

    def is_minimal(self) -> bool:
        return not any(phi.has_unit_entry() for phi in self.maps)


def free_resolution_minimal(M: PresentedModule) -> Resolution:
    """Minimal graded free resolution of ``M``.

    The presentation is pruned, then at each step the syzygies of the current
    map are computed in the Schreyer order it induces and used to discard
    redundant columns (unit entries), so every map is minimal.
    """
    ring = M.ring
    F = ring.field
    n = ring.nvars
    degs, cols = prune_presentation(M.target.degrees, M.presentation.columns, F, n)
    F0 = GradedFreeModule.from_degrees(ring, degs)
    modules = [F0]
    maps: list[ModuleMap] = []
    if not degs:
        return Resolution(modules, maps)
    target = F0
    order = F0.order()
    while cols:
        syz, gb = syzygy_vectors(cols, target, order, gb=True)
        cdeg = [_vec_degree(c, target.degrees) for c in cols]
        cols, cdeg, syz = prune_generators(cols, cdeg, syz, F, n)
        src = GradedFreeModule.from_degrees(ring, cdeg)
        maps.append(ModuleMap(src, target, cols, check=False))
        modules.append(src)
        order = schreyer_order(order, [order.lead(c) for c in cols])
        target = src
        cols = syz
        if len(maps) > n:
            raise AssertionError("resolution longer than the number of variables")
    return Resolution(modules, maps)


@dataclass(frozen=True)
class BettiTable:
    entries: dict = field(default_factory=dict)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.entries.get(ij, 0)

    def total(self, i: int) -> int:
        return sum(v for (a, _), v in self.entries.items() if a == i)

    def totals(self) -> list[int]:
        if not self.entries:
            return []
        return [self.total(i) for i in range(max(i for i, _ in self.entries) + 1)]

    def format(self) -> str:
        """Macaulay2-style table: rows are j - i, columns homological index."""
        if not self.entries:
            return "(zero module)"
        imax = max(i for i, _ in self.entries)
        rows = sorted({j - i for i, j in self.entries})
        width = max(len(str(v)) for v in self.entries.values()) + 1
        lines = ["     " + "".join(f"{i:>{width}}" for i in range(imax + 1))]
        lines.append("total" + "".join(f"{self.total(i):>{width}}" for i in range(imax + 1)))
        for s in rows:
            cells = []
            for i in range(imax + 1):
                v = self.entries.get((i, i + s), 0)
                cells.append(f"{(v if v else '.'):>{width}}")
            lines.append(f"{s:>4}:" + "".join(cells))
        return "\n".join(lines)


def betti_table(M: PresentedModule) -> BettiTable:
    entries: dict = {}
    for i, Fi in enumerate(M.resolution.modules):
        for d in Fi.degrees:
            entries[(i, d)] = entries.get((i, d), 0) + 1
    return BettiTable(entries)


def projective_dimension(M: PresentedModule) -> int | float:
    return M.resolution.length


@dataclass(frozen=True)
class HilbertSeries:
    """``numerator(t) / (1 - t)^nvars``; ``numerator`` maps exponent to coefficient
    (exponents may be negative)."""

    numerator: dict
    nvars: int

    def pole_order(self) -> int | float:
        """Order of the pole at t = 1, i.e. the Krull dimension."""
        num = {k: v for k, v in self.numerator.items() if v}
        if not num:
            return MINUS_INF
        lo = min(num)
        coeffs = [num.get(k, 0) for k in range(lo, max(num) + 1)]
        mult = 0
        while sum(coeffs) == 0:
            # divide by (1 - t): running sums
            q = []
            acc = 0
            for c in coeffs[:-1]:
                acc += c
                q.append(acc)
            coeffs = q
            mult += 1
        return self.nvars - mult

    def __eq__(self, other):
        if not isinstance(other, HilbertSeries):
            return NotImplemented
        a = {k: v for k, v in self.numerator.items() if v}
        b = {k: v for k, v in other.numerator.items() if v}
        return a == b and self.nvars == other.nvars

    def __str__(self) -> str:
        terms = []
        for k in sorted(self.numerator):
            v = self.numerator[k]
            if v:
                mono = "1" if k == 0 else ("t" if k == 1 else f"t^{k}")
                terms.append(f"{v}*{mono}" if mono != "1" else f"{v}")
        return f"({' + '.join(terms) or '0'})/(1-t)^{self.nvars}"


def hilbert_series(M: PresentedModule) -> HilbertSeries:
    """Hilbert series from the graded Betti numbers."""
    num: dict = {}
    for (i, j), b in betti_table(M).entries.items():
        num[j] = num.get(j, 0) + (-1) ** i * b
    return HilbertSeries({k: v for k, v in num.items() if v}, M.ring.nvars)


def monomial_hilbert_numerator(gens: Sequence[tuple[int, ...]]) -> dict:
    """Numerator of the Hilbert series of k[x]/J for a monomial ideal J, by the
    colon recursion N(J + (g)) = N(J) - t^deg(g) N(J : g)."""
    gens = list(gens)
    if not gens:
        return {0: 1}
    if any(not any(g) for g in gens):
        return {}
    *rest, g = gens
    out = dict(monomial_hilbert_numerator(rest))
    colon = []
    for h in rest:
        q = tuple(max(a - b, 0) for a, b in zip(h, g))
        colon.append(q)
    colon = _minimal(colon)
    d = sum(g)
    for k, v in monomial_hilbert_numerator(colon).items():
        out[k + d] = out.get(k + d, 0) - v
    return {k: v for k, v in out.items() if v}


def _minimal(monos):
    monos = sorted(set(monos), key=sum)
    out = []
    for e in monos:
        if not any(all(a <= b for a, b in zip(g, e)) for g in out):
            out.append(e)
    return out


def hilbert_series_initial(M: PresentedModule) -> HilbertSeries:
    """Hilbert series from the initial module of the relations; independent of
    the resolution machinery."""
    gb = M.relation_gb
    by_row: dict = {r: [] for r in range(M.target.rank)}
    for (r, e) in gb.leads:
        by_row[r].append(e)
    num: dict = {}
    for r, monos in by_row.items():
        d = M.target.degrees[r]
        for k, v in monomial_hilbert_numerator(_minimal(monos)).items():
            num[k + d] = num.get(k + d, 0) + v
    return HilbertSeries({k: v for k, v in num.items() if v}, M.ring.nvars)


def module_dimension_initial(M: PresentedModule) -> int | float:
    """Krull dimension from the initial module: max over rows of dim R/in(U)_r."""
    gb = M.relation_gb
    by_row: dict = {r: [] for r in range(M.target.rank)}
    for (r, e) in gb.leads:
        by_row[r].append(e)
    return max((monomial_dimension(M.ring.nvars, monos) for monos in by_row.values()),
               default=MINUS_INF)

