import numpy as np
import pytest

from orlicz_lab import space as sp
from orlicz_lab import young
from orlicz_lab.errors import ArgumentError, ConfigError


def test_cell_validation():
    with pytest.raises(ArgumentError):
        sp.Cell("a", 0.0)
    with pytest.raises(ArgumentError):
        sp.Cell("a", -1.0)
    with pytest.raises(ArgumentError):
        sp.Cell("a", 1.0, kind="blob")
    with pytest.raises(ArgumentError):
        sp.Cell("", 1.0)


def test_space_validation():
    c = sp.Cell("a", 1.0)
    with pytest.raises(ArgumentError):
        sp.MeasureSpace((c, sp.Cell("a", 2.0)))
    with pytest.raises(ArgumentError):
        sp.MeasureSpace(())


def test_subalgebra_partition_validation():
    space, _ = sp.build_atomic_space([0.5, 0.3, 0.2])
    with pytest.raises(ArgumentError):
        sp.SubAlgebra(space, (sp.Block("b", ("a0001", "a0002")),))  # misses a0003
    with pytest.raises(ArgumentError):
        sp.SubAlgebra(space, (sp.Block("b1", ("a0001", "a0002")),
                              sp.Block("b2", ("a0002", "a0003"))))
    with pytest.raises(ArgumentError):
        sp.Block("b", ())


def test_integrate_constant_and_indicator():
    space, _ = sp.build_symmetric_space(8)
    one = sp.constant_fn(space, 1.0)
    assert sp.integrate(one) == pytest.approx(1.0, abs=1e-14)
    chi = sp.indicator(space, ["c0000", "c0007"])
    assert sp.integrate(chi, ["c0000", "c0007"]) == pytest.approx(0.25, abs=1e-14)
    with pytest.raises(ArgumentError):
        sp.integrate(one, ["nope"])


def test_integrate_odd_function_cancels():
    space, _ = sp.build_symmetric_space(100)
    f = sp.fn_from_coords(space, lambda w: w)
    assert abs(sp.integrate(f)) <= 1e-12


def test_fn_from_map_coverage():
    space, _ = sp.build_atomic_space([0.5, 0.5])
    f = sp.fn_from_map(space, {"a0001": 2.0, "a0002": 3.0})
    assert f.value_at("a0002") == 3.0
    with pytest.raises(ArgumentError):
        sp.fn_from_map(space, {"a0001": 2.0})
    with pytest.raises(ArgumentError):
        sp.fn_from_map(space, {"a0001": 1.0, "a0002": 1.0, "zz": 1.0})


def test_symmetric_space_shape():
    space, alg = sp.build_symmetric_space(100)
    assert space.n_cells == 100
    assert space.total_mass == pytest.approx(1.0, abs=1e-12)
    assert alg.n_blocks == 50
    np.testing.assert_allclose(alg.block_masses, 0.02, rtol=1e-12)
    with pytest.raises(ArgumentError):
        sp.build_symmetric_space(7)
    with pytest.raises(ArgumentError):
        sp.build_symmetric_space(0)


def test_symmetric_pairing_formula():
    # blockwise average equals (f(w) + f(-w)) / 2 on this space
    space, alg = sp.build_symmetric_space(40)
    f = sp.fn_from_coords(space, lambda w: w ** 3 + 2.0)
    e = sp.cond_exp(f, alg)
    w = space.coords()
    want = ((w ** 3 + 2.0) + ((-w) ** 3 + 2.0)) / 2.0
    np.testing.assert_allclose(e.arr, want, atol=1e-13)


def test_cond_exp_affine_example():
    space, alg = sp.build_symmetric_space(64)
    f = sp.fn_from_coords(space, lambda w: w + 1.0)
    e = sp.cond_exp(f, alg)
    np.testing.assert_allclose(e.arr, 1.0, atol=1e-12)
    odd = sp.fn_from_coords(space, lambda w: w)
    np.testing.assert_allclose(sp.cond_exp(odd, alg).arr, 0.0, atol=1e-12)


def test_cond_exp_fragment_share():
    space, alg = sp.build_symmetric_space(100)
    chi = sp.indicator(space, ["c0003"])
    e = sp.cond_exp(chi, alg)
    assert e.value_at("c0003") == pytest.approx(0.5, abs=1e-14)
    assert e.value_at("c0096") == pytest.approx(0.5, abs=1e-14)
    assert e.value_at("c0010") == 0.0


def test_cond_exp_identity_on_measurable():
    space, alg = sp.build_symmetric_space(20)
    f = sp.fn_from_coords(space, lambda w: np.abs(w))  # even, so block-constant
    assert sp.is_measurable(f, alg)
    assert sp.cond_exp(f, alg) is f


def test_cond_exp_idempotent_exactly():
    space, alg = sp.build_symmetric_space(30)
    rng = np.random.default_rng(42)
    for _ in range(20):
        f = sp.fn_from_array(space, rng.normal(size=30))
        e1 = sp.cond_exp(f, alg)
        e2 = sp.cond_exp(e1, alg)
        assert (e1.arr == e2.arr).all()


def test_cond_exp_averaging_identity():
    space, alg = sp.build_symmetric_space(50)
    rng = np.random.default_rng(7)
    for _ in range(25):
        f = sp.fn_from_array(space, rng.normal(size=50))
        e = sp.cond_exp(f, alg)
        for b in alg.blocks:
            lhs = sp.integrate(f, b.cells)
            rhs = sp.integrate(e, b.cells)
            assert lhs == pytest.approx(rhs, abs=1e-12)


def test_cond_exp_pull_out():
    space, alg = sp.build_symmetric_space(40)
    rng = np.random.default_rng(9)
    f = sp.fn_from_array(space, rng.normal(size=40))
    g = sp.fn_from_coords(space, lambda w: w ** 2 + 0.5)  # even => measurable
    lhs = sp.cond_exp(f * g, alg)
    rhs_arr = sp.cond_exp(f, alg).arr * g.arr
    np.testing.assert_allclose(lhs.arr, rhs_arr, atol=1e-12)


def test_cond_exp_jensen():
    space, alg = sp.build_symmetric_space(60)
    rng = np.random.default_rng(13)
    phi = young.power_scaled(2.0)
    for _ in range(10):
        f = sp.fn_from_array(space, rng.normal(size=60) * 3.0)
        e = sp.cond_exp(f, alg)
        lhs = phi.eval_many(np.abs(e.arr))
        rhs = sp.cond_exp(sp.fn_from_array(space, phi.eval_many(np.abs(f.arr))), alg)
        assert (lhs <= rhs.arr + 1e-10).all()


def test_cond_exp_positivity_and_support():
    space, alg = sp.build_symmetric_space(40)
    rng = np.random.default_rng(21)
    f_vals = rng.uniform(size=40)
    f_vals[rng.uniform(size=40) < 0.5] = 0.0
    f = sp.fn_from_array(space, f_vals)
    e = sp.cond_exp(f, alg)
    assert (e.arr >= 0).all()
    nz = f.arr != 0
    assert (e.arr[nz] > 0).all()


def test_cond_exp_complex_componentwise():
    space, alg = sp.build_symmetric_space(20)
    rng = np.random.default_rng(3)
    z = rng.normal(size=20) + 1j * rng.normal(size=20)
    f = sp.fn_from_array(space, z)
    e = sp.cond_exp(f, alg)
    er = sp.cond_exp(sp.fn_from_array(space, z.real), alg)
    ei = sp.cond_exp(sp.fn_from_array(space, z.imag), alg)
    np.testing.assert_allclose(e.arr, er.arr + 1j * ei.arr, atol=1e-14)


def test_rotation_space_orbits():
    space, alg = sp.build_rotation_space(4, 25)
    assert space.n_cells == 100
    assert space.total_mass == pytest.approx(1.0, abs=1e-12)
    assert alg.n_blocks == 25
    chi = sp.fn_from_coords(space, lambda w: (w < 0.25).astype(float))
    e = sp.cond_exp(chi, alg)
    np.testing.assert_allclose(e.arr, 0.25, atol=1e-14)


def test_rotation_space_shift_invariance():
    space, alg = sp.build_rotation_space(5, 10)
    f = sp.fn_from_coords(space, lambda w: np.cos(9.0 * w))
    e = sp.cond_exp(f, alg)
    # value at cell i equals value at the cell shifted by 1/5
    for i in range(10):
        assert e.arr[i] == e.arr[i + 10]


def test_rotation_space_minimal():
    space, alg = sp.build_rotation_space(2, 1)
    assert space.n_cells == 2
    assert alg.n_blocks == 1
    with pytest.raises(ArgumentError):
        sp.build_rotation_space(1, 4)
    with pytest.raises(ArgumentError):
        sp.build_rotation_space(3, 0)


def test_rotation_average_matches_integral():
    # the orbit value must reproduce the averaging identity, which pins the
    # 1/n normalization of the orbit sum
    space, alg = sp.build_rotation_space(4, 8)
    f = sp.fn_from_coords(space, lambda w: w)
    e = sp.cond_exp(f, alg)
    assert sp.integrate(e) == pytest.approx(sp.integrate(f), abs=1e-13)
    blk = alg.blocks[0]
    manual = sp.integrate(f, blk.cells) / alg.block_masses[0]
    assert e.value_at(blk.cells[0]) == pytest.approx(manual, rel=1e-13)


def test_sigma_algebra_is_identity():
    space, alg = sp.build_atomic_space([0.5, 0.25, 0.25])
    f = sp.fn_from_array(space, [3.0, -1.0, 2.0])
    assert sp.cond_exp(f, alg) is f


def test_symbolic_sequence_basics():
    seq = sp.SymbolicAtomSequence("2^(-n)", "1 + 1/n", n_max=20)
    np.testing.assert_allclose(seq.masses(3), [0.5, 0.25, 0.125])
    np.testing.assert_allclose(seq.values(2), [2.0, 1.5])
    space, alg, u = seq.materialize(10)
    assert space.n_cells == 10
    assert alg.n_blocks == 10
    assert u.arr[0] == 2.0
    assert all(b.kind == "a-atom" for b in alg.blocks)


def test_symbolic_sequence_rejects_bad_mass():
    with pytest.raises(ArgumentError):
        sp.SymbolicAtomSequence("-n", "1", n_max=5)
    with pytest.raises(ArgumentError):
        sp.SymbolicAtomSequence("1/n", "1", n_max=0)


def test_default_n_max_env(monkeypatch):
    monkeypatch.delenv("ORLICZ_LAB_NMAX", raising=False)
    assert sp.default_n_max() == 10_000
    monkeypatch.setenv("ORLICZ_LAB_NMAX", "250")
    assert sp.default_n_max() == 250
    monkeypatch.setenv("ORLICZ_LAB_NMAX", "zero")
    with pytest.raises(ConfigError):
        sp.default_n_max()


def test_space_config_round_trip():
    space, alg = sp.build_symmetric_space(6)
    cfg = sp.space_to_config(space, alg)
    space2, alg2 = sp.space_from_config(cfg)
    assert space2.ids() == space.ids()
    np.testing.assert_allclose(space2.masses, space.masses)
    assert [b.cells for b in alg2.blocks] == [b.cells for b in alg.blocks]
    f = sp.fn_from_coords(space2, lambda w: w + 1.0)
    np.testing.assert_allclose(sp.cond_exp(f, alg2).arr, 1.0, atol=1e-12)


def test_space_config_errors_name_paths():
    with pytest.raises(ConfigError) as ei:
        sp.space_from_config({"atoms": [{"id": "a", "mass": -1}],
                              "blocks": [{"cells": ["a"]}]})
    assert "atoms[0]" in str(ei.value)
    with pytest.raises(ConfigError) as ei2:
        sp.space_from_config({"atoms": [{"id": "a", "mass": 1}], "blocks": []})
    assert "blocks" in str(ei2.value)
