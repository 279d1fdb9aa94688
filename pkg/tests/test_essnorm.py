import numpy as np
import pytest

from orlicz_lab import essnorm, space as sp, young
from orlicz_lab.errors import ArgumentError

PS2 = young.power_scaled(2.0)


def harmonic_seq(value_fn, n_max=10_000):
    # masses 1/(n(n+1)) telescope to a probability and stay positive in float
    return sp.SymbolicAtomSequence("1/(n*(n+1))", value_fn, n_max=n_max)


def mixed_algebra():
    cells = (sp.Cell("a1", 0.4, "sigma-atom"),
             sp.Cell("f1", 0.3, "fragment"),
             sp.Cell("f2", 0.3, "fragment"))
    space = sp.MeasureSpace(cells)
    alg = sp.SubAlgebra(space, (sp.Block("atom", ("a1",), "a-atom"),
                                sp.Block("carr", ("f1", "f2"), "carrier")))
    return space, alg


# -- level sets -------------------------------------------------------------


def test_level_set_eps_validation():
    seq = harmonic_seq("1/n", n_max=50)
    for bad in (0.0, -1.0):
        with pytest.raises(ArgumentError):
            essnorm.level_set(seq, bad)


def test_level_set_symbolic_examples():
    seq = harmonic_seq("1 + 1/n", n_max=400)
    rep = essnorm.level_set(seq, 1.6)
    assert rep.members == (1,)
    assert rep.classification == "finitely-many-atoms"
    # membership is >=, so the boundary value 1 + 1/2 = 1.5 joins
    rep = essnorm.level_set(seq, 1.5)
    assert rep.members == (1, 2)
    rep = essnorm.level_set(seq, 0.5)
    assert len(rep.members) == 400
    assert rep.classification == "infinitely-many-atoms"


def test_level_set_zero_function():
    rep = essnorm.level_set(harmonic_seq("0", n_max=60), 1.0)
    assert rep.members == ()
    assert rep.classification == "finitely-many-atoms"
    space, alg = mixed_algebra()
    rep = essnorm.level_set(sp.constant_fn(space, 0.0), 1.0, alg)
    assert rep.members == ()
    assert rep.classification == "finitely-many-atoms"


def test_level_set_monotone_in_eps():
    seq = harmonic_seq("2 + (-1)^n * (1 + 1/n)", n_max=200)
    grids = np.linspace(0.1, 2.5, 17)
    prev = None
    for eps in grids[::-1]:
        members = set(essnorm.level_set(seq, float(eps)).members)
        if prev is not None:
            assert prev <= members
        prev = members


def test_level_set_carrier_classification():
    space, alg = mixed_algebra()
    h = sp.fn_from_array(space, np.array([0.9, 0.7, 0.7]))
    rep = essnorm.level_set(h, 0.8, alg)
    assert rep.members == ("atom",)
    assert rep.classification == "finitely-many-atoms"
    rep = essnorm.level_set(h, 0.5, alg)
    assert rep.members == ("atom", "carr")
    assert rep.classification == "contains-non-atomic-mass"


def test_level_set_default_algebra_is_finest():
    space, _ = sp.build_atomic_space([0.5, 0.3, 0.2])
    h = sp.fn_from_array(space, np.array([2.0, 0.1, 1.2]))
    rep = essnorm.level_set(h, 1.0)
    assert len(rep.members) == 2


def test_level_set_rejects_non_measurable_and_complex():
    space, alg = mixed_algebra()
    jagged = sp.fn_from_array(space, np.array([1.0, 0.2, 0.9]))
    with pytest.raises(ArgumentError):
        essnorm.level_set(jagged, 0.5, alg)
    cplx = sp.MeasurableFn(space, (1j, 0.0, 0.0))
    with pytest.raises(ArgumentError):
        essnorm.level_set(cplx, 0.5)


# -- beta -------------------------------------------------------------------


def test_beta_exact_limits():
    r = essnorm.beta(harmonic_seq("1 + 1/n"))
    assert r.beta == 1.0
    assert r.source == "atomic-limsup"
    assert r.details["estimator"] == "aitken"
    r = essnorm.beta(harmonic_seq("1/n"))
    assert r.beta == 0.0


def test_beta_divergent_and_constant_tails():
    # drifting tails are reported by their window sup, never extrapolated
    r = essnorm.beta(harmonic_seq("n"))
    assert r.beta == 10_000.0
    assert r.details["estimator"] == "window-max"
    r = essnorm.beta(harmonic_seq("2.5"))
    assert r.beta == 2.5
    assert essnorm.beta(harmonic_seq("2^n")).beta == np.inf
    r = essnorm.beta(harmonic_seq("n^4"))
    assert r.beta == np.inf
    assert r.details["estimator"] == "increasing-unbounded"


def test_beta_threshold_matches_level_classes():
    # eps clear of beta by BETA_TOL decides the level-set class either way
    seq = harmonic_seq("1 + 1/n")
    b = essnorm.beta(seq).beta
    for eps in np.linspace(0.2, b - essnorm.BETA_TOL, 16):
        assert essnorm.level_set(seq, float(eps)).classification == \
            "infinitely-many-atoms"
    for eps in np.linspace(b + essnorm.BETA_TOL, 2.5, 16):
        assert essnorm.level_set(seq, float(eps)).classification == \
            "finitely-many-atoms"


def test_beta_finite_sources():
    space, alg = sp.build_atomic_space([0.5, 0.3, 0.2])
    r = essnorm.beta(sp.fn_from_array(space, np.array([3.0, 1.0, 2.0])), alg)
    assert r.beta == 0.0
    assert r.source == "atomic-limsup"
    space, alg = mixed_algebra()
    r = essnorm.beta(sp.fn_from_array(space, np.array([0.9, -0.7, -0.7])), alg)
    assert r.beta == 0.7
    assert r.source == "max-of-both"
    space, alg = sp.build_symmetric_space(8)
    r = essnorm.beta(sp.constant_fn(space, 1.3), alg)
    assert r.beta == 1.3
    assert r.source == "non-atomic-esssup"


# -- sandwich ---------------------------------------------------------------


def test_sandwich_multiplication_limit():
    res = essnorm.ess_norm_sandwich(harmonic_seq("1 + 1/n"), PS2)
    assert res.lower == 1.0
    assert res.upper == 1.0
    assert res.gch_C == 1.0
    lo, up = res
    assert (lo, up) == (1.0, 1.0)


def test_sandwich_vanishing_symbol():
    res = essnorm.ess_norm_sandwich(harmonic_seq("1/n"), PS2)
    assert (res.lower, res.upper) == (0.0, 0.0)


def test_sandwich_constant_scaling():
    res = essnorm.ess_norm_sandwich(harmonic_seq("1 + 1/n"), PS2, gch_C=4.0)
    assert res.lower == 1.0
    assert res.upper == 4.0


def test_sandwich_finite_space_ordering():
    space, alg = sp.build_symmetric_space(16)
    rng = np.random.default_rng(5)
    u = sp.fn_from_array(space, rng.uniform(0.2, 2.0, len(space.cells)))
    res = essnorm.ess_norm_sandwich(u, PS2, alg, gch_C=4.0)
    # conditional Jensen: |E u| <= phi*^{-1}(E phi*|u|), so with C >= 1
    # the bracket cannot be inverted
    assert res.lower <= res.upper + 1e-12
    assert res.lower > 0.0
    assert res.lower_beta.source == "non-atomic-esssup"


def test_sandwich_hypothesis_echo():
    res = essnorm.ess_norm_sandwich(harmonic_seq("1/n"), PS2,
                                    masses_to_zero=True,
                                    no_convergent_subsequence=False)
    assert res.hypotheses == {"masses_to_zero": True,
                              "no_convergent_subsequence": False}
    res = essnorm.ess_norm_sandwich(harmonic_seq("1/n"), PS2)
    assert res.hypotheses["masses_to_zero"] is None


def test_sandwich_algebra_arguments():
    space, alg = sp.build_atomic_space([0.6, 0.4])
    with pytest.raises(ArgumentError):
        essnorm.ess_norm_sandwich(harmonic_seq("1/n"), PS2, alg)
    with pytest.raises(ArgumentError):
        essnorm.ess_norm_sandwich(sp.constant_fn(space, 1.0), PS2)


# -- truncation distance curve ---------------------------------------------


def test_truncation_curve_noncompact_symbol():
    curve = essnorm.truncation_distance_curve(
        harmonic_seq("1 + 1/n"), PS2, (1, 2, 4, 8, 16, 32, 64))
    for _, d in curve:
        assert abs(d - 1.0) <= 0.05
    for (_, a), (_, b) in zip(curve, curve[1:]):
        assert a >= b


def test_truncation_curve_compact_symbol():
    curve = essnorm.truncation_distance_curve(
        harmonic_seq("1/n"), PS2, (1, 4, 16, 64))
    assert curve[-1][1] <= 0.05
    for (_, a), (_, b) in zip(curve, curve[1:]):
        assert a >= b


def test_truncation_curve_finite_support():
    space, alg = sp.build_atomic_space([0.3, 0.2, 0.2, 0.1, 0.1, 0.1])
    u = sp.fn_from_array(space, np.array([0.005, 0.003, 0.002, 0.0, 0.0, 0.0]))
    curve = essnorm.truncation_distance_curve(u, PS2, (1, 2, 3, 4), alg)
    dists = [d for _, d in curve]
    assert dists[0] == pytest.approx(0.003, rel=1e-9)
    assert dists[1] == pytest.approx(0.002, rel=1e-9)
    assert dists[2] == 0.0
    assert dists[3] == 0.0


def test_truncation_curve_validation():
    seq = harmonic_seq("1/n", n_max=100)
    for bad in ((), (0, 1), (3, 2), (1, 1)):
        with pytest.raises(ArgumentError):
            essnorm.truncation_distance_curve(seq, PS2, bad)
    space, alg = sp.build_atomic_space([0.6, 0.4])
    with pytest.raises(ArgumentError):
        essnorm.truncation_distance_curve(seq, PS2, (1, 2), alg)
    with pytest.raises(ArgumentError):
        essnorm.truncation_distance_curve(sp.constant_fn(space, 1.0), PS2, (1, 2))


def test_compactness_dichotomy_consistency():
    # beta == 0 iff the truncation distances die out
    for value_fn, vanish in (("1/n", True), ("1 + 1/n", False)):
        seq = harmonic_seq(value_fn)
        b = essnorm.beta(seq).beta
        tail = essnorm.truncation_distance_curve(seq, PS2, (32, 64))[-1][1]
        if vanish:
            assert b == 0.0 and tail <= 0.05
        else:
            assert b > 0.5 and tail > 0.5
