"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line, printed in the "acceptance criteria"
section of the pytest summary (and immediately with ``-s``).
"""

import random
from functools import lru_cache

import pytest

from cmdefect.corpus import (
    Bounds,
    CorpusSpec,
    example_excm,
    example_matsumura,
    random_monomial_generators,
    random_monomial_module,
    verify_modules,
)
from cmdefect.groebner import Ideal, divide_with_remainder
from cmdefect.invariants import (
    MonomialPrime,
    all_monomial_primes,
    cm_defect,
    grade_of_ideal_on_module,
    local_profile_at_prime,
    module_depth_graded,
    module_dimension,
)
from cmdefect.poly import PolyRing
from cmdefect.resolution import hilbert_series
from cmdefect.serre import PropertyQuery, check_condition, schenzel_classical, schenzel_exact

from . import oracles
from .conftest import ACCEPTANCE_LINES

SEED = 42
PER_M = 50
VARS = (2, 3, 4, 5)
# wide enough that every n <= dim+2 and l <= dim+1 is covered for dim <= 5
FULL = Bounds(n_max=7, l_max=6)


def record(cid: str, ok: bool, detail: str):
    line = f"criterion {cid}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@lru_cache(maxsize=None)
def corpus():
    """200 seeded monomial modules: 50 each in 2, 3, 4 and 5 variables."""
    out = []
    for m in VARS:
        spec = CorpusSpec(seed=SEED, variable_count=m, instance_count=PER_M)
        for i in range(PER_M):
            out.append((m, random_monomial_generators(spec, i), random_monomial_module(spec, i)))
    return out


@lru_cache(maxsize=None)
def reports():
    mods = [M for _, _, M in corpus()]
    return {r.statement_id: r for r in verify_modules(mods, FULL)}


def summarize(ids):
    reps = [reports()[s] for s in ids]
    bad = sum(len(r.counterexamples) for r in reps)
    parts = ", ".join(f"({r.statement_id}) {r.instances_checked} modules/{len(r.counterexamples)} bad" for r in reps)
    return bad, parts


# ---------------------------------------------------------------------------


def test_criterion_1_excm_grid():
    grid = [(d, r) for d in range(3) for r in range(1, 4) if d + r + 1 <= 6]
    wrong = []
    for d, r in grid:
        A = example_excm(d, r)
        got = (module_dimension(A), module_depth_graded(A), cm_defect(A))
        if got != (r + d, d, r):
            wrong.append(((d, r), got))
    record("1", not wrong, f"{len(grid)} (d,r) pairs, dim=r+d depth=d cmd=r; mismatches {wrong}")
    assert not wrong


def test_criterion_2_matsumura():
    A = example_matsumura()
    ring = A.ring
    X, _, Z = ring.gens()
    top = local_profile_at_prime(A, MonomialPrime.irrelevant(ring))
    p = local_profile_at_prime(A, MonomialPrime.from_names(ring, ["X", "Z"]))
    g = grade_of_ideal_on_module(Ideal([X, Z], ring), A)
    ok = (module_dimension(A) == 2 and top.depth_local == 0 and p.depth_local == 1 and g == 0
          and g < p.depth_local)
    record("2", ok, f"dim {module_dimension(A)}, depth {top.depth_local}; at (X,Z): depth {p.depth_local}, "
                    f"grade {g} < {p.depth_local}")
    assert ok


def test_criterion_3_cmd_level_equivalence():
    bad, parts = summarize("a")
    record("3", bad == 0, f"cmd(M) <= l iff (C_n^l) for all n <= dim+2, l <= dim+1: {parts}")
    assert bad == 0 and reports()["a"].instances_checked == len(VARS) * PER_M


def test_criterion_4_low_depth_equivalence():
    bad, parts = summarize("b")
    record("4", bad == 0, f"(C_n^l) iff cmd(M_p) <= l where depth(M_p) <= n-l-1: {parts}")
    assert bad == 0


def test_criterion_5_monotonicity_and_snl():
    bad, parts = summarize("cd")
    record("5", bad == 0, f"monotonicity in n and l, (S_n^l) => (C_n^l): {parts}")
    assert bad == 0


def test_criterion_6_grade_criterion():
    mods = corpus()[:: 2]  # 100 modules, 25 per variable count
    disagreements = 0
    checked = 0
    for m, _, M in mods:
        prof = [p for p in (local_profile_at_prime(M, P) for P in all_monomial_primes(m)) if p.in_support]
        grades = {p.prime: (grade_of_ideal_on_module(p.prime.ideal(M.ring), M) if p.height else 0) for p in prof}
        d = module_dimension(M)
        top = int(max(d, 0))
        for n in range(top + 3):
            for l in range(top + 2):
                by_grade = all(grades[p.prime] >= min(n, p.dim_local) - l for p in prof)
                by_depth = check_condition(M, PropertyQuery.Cnl(n, l)).answer == "yes"
                checked += 1
                disagreements += by_grade != by_depth
    record("6", disagreements == 0, f"{len(mods)} modules, {checked} (n,l) verdicts, "
                                    f"{disagreements} grade/depth disagreements")
    assert disagreements == 0


def test_criterion_7a_profile_paths_agree():
    mismatches = 0
    rows = 0
    for m, gens, M in corpus():
        for P in all_monomial_primes(m):
            a = local_profile_at_prime(M, P, method="localization")
            b = local_profile_at_prime(M, P, method="ext")
            rows += 1
            mismatches += a.fields() != b.fields()
            ins, d, dp = oracles.profile(gens, m, P.variables)
            mismatches += a.in_support != ins or (ins and (a.dim_local, a.depth_local) != (d, dp))
    record("7a", mismatches == 0, f"localization vs Ext-support profiles (and Hochster oracle) at "
                                  f"{rows} monomial primes of {len(corpus())} modules: {mismatches} mismatches")
    assert mismatches == 0


def _schenzel_comparison():
    cases = misses = unsound = exact_bad = 0
    for m, _, M in corpus():
        d = int(max(module_dimension(M), 0))
        for k in range(d + 3):
            truth = check_condition(M, PropertyQuery.Sn(k), method="exhaustive").answer == "yes"
            classical = schenzel_classical(M, k)
            cases += 1
            misses += truth and not classical
            unsound += classical and not truth
            exact_bad += schenzel_exact(M, k) != truth
    return cases, misses, unsound, exact_bad


def test_criterion_7b_ext_test_is_sound():
    cases, misses, unsound, exact_bad = _schenzel_comparison()
    record("7b-sound", unsound == 0 and exact_bad == 0,
           f"{cases} (module, k) cases: Ext-dimension (S_k) test never claims (S_k) falsely ({unsound}); "
           f"pairwise Ext-support test agrees everywhere ({exact_bad} disagreements)")
    assert unsound == 0 and exact_bad == 0


@pytest.mark.xfail(strict=True, reason="the classical Ext-dimension test is only sufficient for (S_k) "
                                       "on modules that are not equidimensional")
def test_criterion_7b_classical_ext_test_agrees():
    cases, misses, unsound, _ = _schenzel_comparison()
    record("7b", misses + unsound == 0,
           f"classical test 'dim Ext^i <= m-i-k for i > m-dim M' vs exhaustive (S_k): "
           f"{misses + unsound}/{cases} disagreements ({misses} missed, {unsound} unsound)")
    assert misses + unsound == 0


def test_criterion_8_regular_element_laws():
    bad, parts = summarize("fgh")
    record("8", bad == 0, f"cmd preserved mod a regular element, (C_n^l) passes to and lifts from "
                          f"M/xM, variable adjunction: {parts}")
    assert bad == 0 and reports()["f"].instances_checked == len(VARS) * PER_M


def _spoly_remainders_vanish(ideal: Ideal) -> bool:
    G = list(ideal.groebner())
    F = ideal.ring.field
    ring = ideal.ring
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            f, g = G[i], G[j]
            L = tuple(max(a, b) for a, b in zip(f.leading_monomial, g.leading_monomial))
            s = ring.monomial(tuple(a - b for a, b in zip(L, f.leading_monomial)), F.div(1, f.leading_coefficient)) * f \
                - ring.monomial(tuple(a - b for a, b in zip(L, g.leading_monomial)), F.div(1, g.leading_coefficient)) * g
            if divide_with_remainder(s, G)[1]:
                return False
    return all(not divide_with_remainder(h, G)[1] for h in ideal.generators)


def test_criterion_9_engine_soundness():
    bases = resolutions = poles = failures = 0
    for m, gens, M in corpus():
        ideal = Ideal(M.presentation.matrix[0], M.ring)
        bases += 1
        failures += not _spoly_remainders_vanish(ideal)
        res = M.resolution
        resolutions += 1
        failures += not (res.is_complex() and res.is_minimal() and res.length <= m)
        poles += 1
        failures += hilbert_series(M).pole_order() != oracles.dimension(gens, m)
    # bases of random non-monomial ideals and of the named examples
    rng = random.Random(SEED)
    ring = PolyRing(("x", "y", "z", "w"))
    for _ in range(40):
        gens = []
        for _ in range(rng.randint(1, 3)):
            f = ring.zero()
            for _ in range(rng.randint(1, 3)):
                f = f + ring.monomial(tuple(rng.randint(0, 2) for _ in range(4)), rng.randint(-3, 3))
            if f:
                gens.append(f)
        if gens:
            bases += 1
            failures += not _spoly_remainders_vanish(Ideal(gens, ring))
    for A in [example_matsumura()] + [example_excm(d, r) for d in range(2) for r in range(1, 3)]:
        bases += 1
        failures += not _spoly_remainders_vanish(Ideal(A.presentation.matrix[0], A.ring))
    record("9", failures == 0, f"{bases} Groebner bases S-pair reduced, {resolutions} resolutions complex and "
                               f"minimal, {poles} Hilbert pole orders = combinatorial dimension; {failures} failures")
    assert failures == 0
