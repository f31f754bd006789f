import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmdefect.corpus import CorpusSpec, example_excm, example_matsumura, random_monomial_module
from cmdefect.groebner import Ideal
from cmdefect.invariants import (
    MonomialPrime,
    NotMonomialError,
    cm_defect,
    localize_at_monomial_prime,
    module_dimension,
)
from cmdefect.poly import PolyRing
from cmdefect.resolution import PresentedModule
from cmdefect.serre import (
    PropertyQuery,
    almost_cm,
    check_condition,
    cmd_from_profiles,
    exhaustive_monomial_report,
    minimal_defect_level,
    profile_satisfies,
    schenzel_classical,
    schenzel_exact,
    witness_set,
)

from . import oracles

R = PolyRing(("x", "y", "z"))
x, y, z = R.gens()
XYXZ = PresentedModule.cyclic(Ideal([x * y, x * z], R))


def small_corpus(m, count, seed=42):
    spec = CorpusSpec(seed=seed, variable_count=m, instance_count=count)
    return [random_monomial_module(spec, i) for i in range(count)]


def oracle_yes(gens, m, a, b):
    for ins, d, dp in oracles.all_profiles(gens, m).values():
        if ins and dp < min(d, a) - b:
            return False
    return True


# --- queries ---------------------------------------------------------------------

def test_query_validation():
    with pytest.raises(ValueError):
        PropertyQuery("Tn", 1)
    with pytest.raises(ValueError):
        PropertyQuery("Cnl", 2)
    with pytest.raises(ValueError):
        PropertyQuery.Sn(-1)
    with pytest.raises(ValueError):
        PropertyQuery("cmd_le_l")
    assert PropertyQuery.Cn(3).bounds() == (3, 1)
    assert PropertyQuery.Snl(5, 2).bounds() == (3, 0)
    assert PropertyQuery.Snl(1, 2).bounds() is None
    assert PropertyQuery.almostCM().bounds()[1] == 1


# --- worked examples ---------------------------------------------------------------------

def test_excm_cmd_level_holds_for_every_n():
    A = example_excm(1, 2)
    for n in range(6):
        v = check_condition(A, PropertyQuery.Cnl(n, 2))
        assert v.answer == "yes"


def test_excm_c31_fails_at_irrelevant_prime():
    A = example_excm(1, 2)
    v = check_condition(A, PropertyQuery.Cnl(3, 1))
    assert v.answer == "no"
    assert v.certificate == MonomialPrime.irrelevant(A.ring)
    assert (v.profile.dim_local, v.profile.depth_local) == (3, 1)
    assert not profile_satisfies(v.profile, 3, 1)
    rec = v.record(A.ring)
    assert rec["certificate_prime"] == "(X0,X1,X2,T1)"
    assert set(rec) == {"property", "n", "l", "answer", "certificate_prime", "profile", "justification"}


def test_large_l_is_always_yes():
    for M in small_corpus(3, 10) + [example_matsumura(), XYXZ]:
        d = module_dimension(M)
        for n in range(5):
            assert check_condition(M, PropertyQuery.Cnl(n, d + 1)).answer == "yes"


def test_xy_xz_serre():
    assert check_condition(XYXZ, PropertyQuery.Sn(1)).answer == "yes"
    v = check_condition(XYXZ, PropertyQuery.Sn(2))
    assert v.answer == "no" and v.certificate == MonomialPrime.irrelevant(R)


def test_almost_cm_examples():
    assert almost_cm(XYXZ)
    assert not almost_cm(example_excm(1, 2))
    for M in small_corpus(3, 20):
        if module_dimension(M) <= 1:
            assert almost_cm(M)
        assert almost_cm(M) == (check_condition(M, PropertyQuery.almostCM()).answer == "yes")


def test_minimal_defect_level_examples():
    A = example_excm(1, 2)
    # localized at (X0,X1,X2) the ring has dim 2 and depth 0, so n = 2 already needs l = 2
    assert minimal_defect_level(A, 2) == 2
    v = check_condition(A, PropertyQuery.Cnl(2, 1))
    assert v.answer == "no" and v.certificate == MonomialPrime([0, 1, 2])
    assert minimal_defect_level(A, 1) == 1
    for n in range(3, 7):
        assert minimal_defect_level(A, n) == 2
    assert minimal_defect_level(PresentedModule.free(R), 4) == 0
    with pytest.raises(NotMonomialError):
        minimal_defect_level(PresentedModule.cyclic(Ideal.parse(R, ["x^2 - y*z"])), 2)


def test_minimal_defect_level_is_least():
    for M in small_corpus(4, 15):
        for n in range(5):
            l = minimal_defect_level(M, n)
            assert check_condition(M, PropertyQuery.Cnl(n, l)).answer == "yes"
            if l:
                assert check_condition(M, PropertyQuery.Cnl(n, l - 1)).answer == "no"


# --- exhaustive report -------------------------------------------------------------------

def test_report_examples():
    S = PolyRing(("t",))
    rows = exhaustive_monomial_report(PresentedModule.free(S))
    assert len(rows) == 2 and all(p.cmd_local == 0 for p in rows)
    A = example_matsumura()
    rows = exhaustive_monomial_report(A)
    assert len(rows) == 8
    assert (rows[-1].depth_local, rows[-1].cmd_local) == (0, 2)
    assert cmd_from_profiles(rows) == cm_defect(A) == 2
    rows = exhaustive_monomial_report(PresentedModule.zero(R))
    assert len(rows) == 8 and not any(p.in_support for p in rows)
    with pytest.raises(NotMonomialError):
        exhaustive_monomial_report(PresentedModule.cyclic(Ideal.parse(R, ["x^2 - y*z"])))


def test_zero_module_satisfies_everything():
    Z = PresentedModule.zero(R)
    for q in (PropertyQuery.Sn(3), PropertyQuery.Cnl(4, 0), PropertyQuery.almostCM()):
        assert check_condition(Z, q).answer == "yes"
        assert check_condition(Z, q, method="general").answer == "yes"


# --- witness sets ------------------------------------------------------------------------

def test_witness_set_examples():
    assert witness_set(PresentedModule.zero(R)) == []
    cm = witness_set(PresentedModule.cyclic(Ideal([x, y], R)))
    assert cm == [Ideal([x, y], R), Ideal([x, y], R)]
    W = witness_set(XYXZ)
    assert Ideal([x, y, z], R) in W
    assert Ideal([x], R) in W and Ideal([y, z], R) in W


# --- lattice of conditions ------------------------------------------------------------------

@pytest.mark.parametrize("m", [2, 3, 4])
def test_identities_and_monotonicity(m):
    for M in small_corpus(m, 15):
        d = module_dimension(M)
        top = int(d) + 2 if d >= 0 else 2
        ans = {}
        for n in range(top + 1):
            for l in range(top + 1):
                ans[n, l] = check_condition(M, PropertyQuery.Cnl(n, l)).answer == "yes"
        for n in range(top + 1):
            assert ans[n, 0] == (check_condition(M, PropertyQuery.Sn(n)).answer == "yes")
            assert ans[n, 1] == (check_condition(M, PropertyQuery.Cn(n)).answer == "yes")
            for l in range(top + 1):
                snl = check_condition(M, PropertyQuery.Snl(n, l)).answer == "yes"
                if snl:
                    assert ans[n, l]
                if n >= l:
                    assert snl == (check_condition(M, PropertyQuery.Sn(n - l)).answer == "yes")
                else:
                    assert snl
                if ans[n, l]:
                    if n:
                        assert ans[n - 1, l]
                    if l < top:
                        assert ans[n, l + 1]


def test_localizes_well():
    for M in small_corpus(3, 15):
        for n in range(4):
            for l in range(3):
                q = PropertyQuery.Cnl(n, l)
                if check_condition(M, q).answer != "yes":
                    continue
                for P in [MonomialPrime(S) for S in ([0, 1], [1, 2], [0, 2])]:
                    L = localize_at_monomial_prime(M, P)
                    assert check_condition(L, q).answer == "yes"


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(*[st.integers(0, 2)] * 4).filter(any), min_size=1, max_size=5),
       st.integers(0, 5), st.integers(0, 3))
def test_exhaustive_matches_oracle(gens, n, l):
    ring = PolyRing(("a", "b", "c", "d"))
    M = PresentedModule.cyclic(Ideal.from_monomials(ring, gens))
    v = check_condition(M, PropertyQuery.Cnl(n, l))
    assert (v.answer == "yes") == oracle_yes(gens, 4, n, l)
    if v.answer == "no":
        assert not profile_satisfies(v.profile, n, l)


# --- general path ---------------------------------------------------------------------------

QUERIES = [PropertyQuery.Sn(1), PropertyQuery.Sn(2), PropertyQuery.Cn(2), PropertyQuery.Cnl(3, 1),
           PropertyQuery.Cnl(4, 2), PropertyQuery.Snl(3, 1), PropertyQuery.almostCM(),
           PropertyQuery.cmd_le_l(0)]


@pytest.mark.parametrize("m", [3, 4])
def test_general_path_agrees_with_exhaustive(m):
    for M in small_corpus(m, 12, seed=7):
        for q in QUERIES:
            ex = check_condition(M, q, method="exhaustive")
            exact = check_condition(M, q, method="general", strategy="exact")
            suff = check_condition(M, q, method="general", strategy="sufficient")
            assert exact.answer == ex.answer
            assert suff.answer in (ex.answer, "unknown")
            if exact.answer == "no" and exact.profile is not None:
                a, b = q.bounds()
                assert not profile_satisfies(exact.profile, a, b)


def test_general_path_on_non_monomial_input():
    # twisted cubic cone: Cohen-Macaulay of dimension 2
    C = PresentedModule.cyclic(Ideal.parse(R, ["x*z - y^2"]))
    for q in (PropertyQuery.Sn(3), PropertyQuery.almostCM()):
        v = check_condition(C, q)
        assert v.answer == "yes" and v.tag == "cmd_bound"
    # a plane meeting a line at a point in 4-space: not S_2
    S = PolyRing(("a", "b", "c", "d"))
    M = PresentedModule.cyclic(Ideal.parse(S, ["a", "b"]) & Ideal.parse(S, ["c", "d - a"]))
    assert check_condition(M, PropertyQuery.Sn(2)).answer == "no"
    assert check_condition(M, PropertyQuery.Sn(1)).answer == "yes"


def test_unknown_strategy_rejected():
    with pytest.raises(ValueError):
        check_condition(XYXZ, PropertyQuery.Sn(1), method="general", strategy="guess")
    with pytest.raises(ValueError):
        check_condition(XYXZ, PropertyQuery.Sn(1), method="psychic")


# --- Ext-dimension criteria ----------------------------------------------------------------

def test_classical_test_misses_non_equidimensional_case():
    # R/(xy,xz) satisfies S_1, but Ext^2 has a one-dimensional support
    assert check_condition(XYXZ, PropertyQuery.Sn(1)).answer == "yes"
    assert not schenzel_classical(XYXZ, 1)
    assert schenzel_exact(XYXZ, 1)


@pytest.mark.parametrize("m", [3, 4])
def test_classical_test_is_sound_and_exact_test_agrees(m):
    for M in small_corpus(m, 25, seed=3):
        d = module_dimension(M)
        for k in range(int(max(d, 0)) + 2):
            truth = check_condition(M, PropertyQuery.Sn(k)).answer == "yes"
            if schenzel_classical(M, k):
                assert truth
            assert schenzel_exact(M, k) == truth
