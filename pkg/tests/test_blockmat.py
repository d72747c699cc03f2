import numpy as np
import pytest

from conftest import J2
from stardmp.blockmat import (
    BlockMatrix,
    assemble,
    cor43_check,
    cor45_check,
    cor47_check,
    lemma41_check,
    swap_conjugate,
    swap_matrix,
    thm42_check,
    thm44_check,
    thm46_check,
)
from stardmp.gen import GenSpec, gen_block
from stardmp.geninv import is_star_dmp
from stardmp.matcore import ShapeError, identity

I1 = identity(1)
Z1 = np.zeros((1, 1))


def rand(seed, n=3):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_assemble():
    assert np.array_equal(assemble(BlockMatrix(I1, Z1, Z1, I1)), identity(2))
    n = 2
    z, i = np.zeros((n, n)), identity(n)
    assert np.array_equal(assemble(BlockMatrix(z, i, i, z)), swap_matrix(n))
    m = BlockMatrix(rand(1), rand(2), rand(3), rand(4))
    back = BlockMatrix.split(assemble(m))
    for k in "ABCD":
        assert np.array_equal(getattr(back, k), getattr(m, k))


def test_block_shapes_checked():
    with pytest.raises(ShapeError):
        BlockMatrix(identity(2), identity(2), identity(3), identity(2))
    with pytest.raises(ShapeError):
        BlockMatrix.split(identity(3))


def test_swap_conjugate():
    m = BlockMatrix(rand(1), rand(2), rand(3), rand(4))
    twice = swap_conjugate(swap_conjugate(m))
    assert all(np.array_equal(getattr(twice, k), getattr(m, k)) for k in "ABCD")
    s = swap_conjugate(BlockMatrix(rand(1), np.zeros((3, 3)), np.zeros((3, 3)), rand(4)))
    assert np.array_equal(s.A, rand(4)) and not s.B.any()
    p = swap_matrix(3)
    assert np.allclose(assemble(swap_conjugate(m)), p @ assemble(m) @ p)


def test_swap_preserves_verdict():
    for seed in range(5):
        m = gen_block("T4.4", GenSpec(3, 1, seed))
        assert is_star_dmp(assemble(m)).verdict == is_star_dmp(assemble(swap_conjugate(m))).verdict


def test_lemma41_examples():
    v = lemma41_check(identity(2), identity(2))
    assert v.hypotheses_hold and v.side1
    v = lemma41_check([[1]], [[0]])
    assert v.hypotheses_hold and v.side1
    b = rand(7)
    v = lemma41_check(b, b.conj().T)
    assert v.hypotheses_hold and v.side1
    assert v.residuals["Q^2=diag(BC,CB)"] < 1e-14


def test_thm42_examples():
    i, z = identity(2), np.zeros((2, 2))
    v = thm42_check(BlockMatrix(i, z, z, i))
    assert v.hypotheses_hold and v.side1
    v = thm42_check(BlockMatrix(i, z, rand(3, 2), i))
    assert v.hypotheses_hold and v.side1
    v = thm42_check(gen_block("T4.2", GenSpec(3, 1, 9)))
    assert v.hypotheses_hold and v.side1


def test_thm42_nilpotency_hypothesis():
    i, z = identity(1), np.zeros((1, 1))
    v = thm42_check(BlockMatrix(i, i, i, i))
    assert not v.hypotheses["A^D B D^D C nilpotent"]
    assert v.equivalence_ok


def test_thm44_examples():
    i, z = identity(2), np.zeros((2, 2))
    assert thm44_check(BlockMatrix(i, z, z, i)).side1
    h = np.array([[2, 1j], [-1j, 1]])
    v = thm44_check(BlockMatrix(h, z, h @ h + 3 * i, h))
    assert v.hypotheses_hold and v.side1
    v = thm44_check(gen_block("T4.4", GenSpec(3, 1, 17)))
    assert v.hypotheses_hold and v.side1


def test_thm46_examples():
    z = np.zeros((2, 2))
    h = np.array([[2, 1j], [-1j, 1]])
    v = thm46_check(BlockMatrix(h, z, z, np.diag([1.0, 0])))
    assert v.hypotheses_hold and v.side1
    v = thm46_check(BlockMatrix(identity(2), rand(5, 2), z, identity(2)))
    assert v.hypotheses_hold and v.side1
    v = thm46_check(gen_block("T4.6", GenSpec(3, 1, 21)))
    assert v.hypotheses_hold and v.side1 and v.witness_m is not None


def test_thm46_sum_hypothesis_can_fail():
    # A = 1, D = 0, B = 1: the first sum is A^(m-1) B D^pi = 1 for every m
    v = thm46_check(BlockMatrix([[1]], [[1]], [[0]], [[0]]))
    assert v.broken == ["sums_vanish"]


def test_corollaries_on_swapped_instances():
    for theorem, cor, fn in (("T4.2", "C4.3", cor43_check), ("T4.4", "C4.5", cor45_check), ("T4.6", "C4.7", cor47_check)):
        m = gen_block(cor, GenSpec(3, 1, 23))
        v = fn(m)
        assert v.theorem_id == cor
        assert v.hypotheses_hold and v.side1
        assert "swap_conjugate_changed_verdict" not in v.notes
    v = cor47_check(BlockMatrix(J2, np.zeros((2, 2)), np.zeros((2, 2)), J2))
    assert v.hypotheses_hold and v.side1
