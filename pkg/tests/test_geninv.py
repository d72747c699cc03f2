import numpy as np
import pytest

from conftest import IDEM, J2, diag
from stardmp.gen import GenSpec, gen_ep, gen_oblique, gen_star_dmp
from stardmp.geninv import (
    InverseKind,
    NoCoreInverse,
    NoGroupInverse,
    adjoint_pseudo_core_agrees,
    certification_threshold,
    core_inverse,
    drazin,
    group_inverse,
    index,
    is_EP,
    is_projection,
    is_star_dmp,
    moore_penrose,
    pseudo_core,
)
from stardmp.matcore import identity, inverse

HERM = np.array([[2, 1j], [-1j, 3]])
INV = np.array([[1, 2], [3j, 4]])


def penrose_residuals(a, x):
    return [
        np.abs(a @ x @ a - a).max(),
        np.abs(x @ a @ x - x).max(),
        np.abs((a @ x).conj().T - a @ x).max(),
        np.abs((x @ a).conj().T - x @ a).max(),
    ]


def test_index():
    assert index(INV) == 0
    assert index(J2) == 2
    assert index(diag(2, 0)) == 1
    assert index(np.zeros((3, 3))) == 1


def test_index_of_long_chain():
    n = 6
    shift = np.eye(n, k=1)
    assert index(shift) == n
    assert index(np.kron(diag(1, 0), shift)) == n


def test_moore_penrose_examples():
    x, cert = moore_penrose(diag(3, 0))
    assert np.allclose(x, diag(1 / 3, 0)) and cert.passed
    assert cert.kind is InverseKind.MOORE_PENROSE
    q, _ = np.linalg.qr(INV)
    assert np.allclose(moore_penrose(q)[0], q.conj().T)


def test_moore_penrose_rank_one_oracle():
    # frozen value; the Penrose equations are checked directly as the oracle
    expected = np.array([[0.5, 0], [0.5, 0]])
    assert max(penrose_residuals(IDEM, expected)) < 1e-15
    x, _ = moore_penrose(IDEM)
    assert np.allclose(x, expected, atol=1e-12)


def test_moore_penrose_rectangular():
    a = np.array([[1, 2j, 0], [0, 1, 1]])
    x, cert = moore_penrose(a)
    assert x.shape == (3, 2)
    assert max(penrose_residuals(a, x)) < 1e-12
    assert cert.passed


def test_drazin_examples():
    res, cert = drazin(J2)
    assert np.allclose(res.drazin, 0) and res.index == 2
    assert np.allclose(res.spectral_idempotent, identity(2))
    assert cert.passed

    res, _ = drazin(diag(2, 0))
    assert np.allclose(res.drazin, diag(0.5, 0)) and res.index == 1
    assert np.allclose(res.spectral_idempotent, diag(0, 1))


def test_drazin_of_idempotent_is_itself():
    res, _ = drazin(IDEM)
    x = res.drazin
    # defining equations, checked independently
    assert np.allclose(x @ IDEM @ IDEM, IDEM)
    assert np.allclose(IDEM @ x @ x, x)
    assert np.allclose(IDEM @ x, x @ IDEM)
    assert np.allclose(x, IDEM)
    assert np.allclose(res.spectral_idempotent, [[0, -1], [0, 1]])


@pytest.mark.parametrize("method", ["cline", "schur"])
def test_drazin_methods_agree(method):
    a = gen_oblique(GenSpec(5, 2, 11))
    ref, _ = drazin(a)
    res, cert = drazin(a, method=method)
    assert cert.passed
    assert np.allclose(res.drazin, ref.drazin, atol=1e-7)


def test_drazin_rejects_unknown_method():
    with pytest.raises(ValueError):
        drazin(J2, method="power")


def test_drazin_scale_treats_roundoff_as_zero():
    tiny = 1e-17 * np.array([[1, 2], [3, 4]])
    res, _ = drazin(tiny, scale=1.0)
    assert res.core_rank == 0 and np.array_equal(res.drazin, np.zeros((2, 2)))


def test_group_inverse():
    assert np.allclose(group_inverse(diag(2, 0))[0], diag(0.5, 0))
    assert np.allclose(group_inverse(INV)[0], inverse(INV))
    with pytest.raises(NoGroupInverse):
        group_inverse(J2)


def test_core_inverse():
    assert np.allclose(core_inverse(INV)[0], inverse(INV))
    with pytest.raises(NoCoreInverse):
        core_inverse(J2)
    # oracle: a^# a a^+ with a^# = a for this idempotent and a^+ from the Penrose check above
    oracle = IDEM @ IDEM @ np.array([[0.5, 0], [0.5, 0]])
    x, cert = core_inverse(IDEM)
    assert np.allclose(x, oracle) and np.allclose(x, diag(1, 0))
    assert cert.passed


def test_pseudo_core():
    assert np.allclose(pseudo_core(J2)[0], 0)
    assert np.allclose(pseudo_core(HERM)[0], inverse(HERM))
    x, cert = pseudo_core(IDEM)
    k = 1
    a = IDEM
    assert np.allclose(x @ np.linalg.matrix_power(a, k + 1), np.linalg.matrix_power(a, k))
    assert np.allclose(a @ x @ x, x)
    assert np.allclose((a @ x).conj().T, a @ x)
    assert np.allclose(x, diag(1, 0)) and cert.passed


def test_is_projection():
    assert is_projection(diag(1, 0))
    assert not is_projection(IDEM)
    assert is_projection(0.5 * np.ones((2, 2)))


def test_is_ep():
    assert is_EP(HERM)
    assert not is_EP(J2)
    assert not is_EP(IDEM)


@pytest.mark.parametrize(
    "a, verdict",
    [(diag(2, 0), True), (J2, True), (IDEM, False), (HERM, True), (np.zeros((3, 3)), True)],
)
def test_is_star_dmp_examples(a, verdict):
    rep = is_star_dmp(a)
    assert rep.verdict is verdict
    assert rep.consistent
    assert rep.to_json()["verdict"] is verdict


def test_report_flags_inconsistency():
    from stardmp.geninv import StarDMPReport

    rep = StarDMPReport(True, False, True, 1)
    assert not rep.consistent and rep.verdict


def test_low_index_inverses_coincide():
    a = gen_ep(GenSpec(4, 2, 5))
    assert np.allclose(drazin(a)[0].drazin, group_inverse(a)[0])
    assert np.allclose(pseudo_core(a)[0], core_inverse(a)[0])


def test_invertible_all_inverses_equal():
    want = inverse(INV)
    for fn in (moore_penrose, group_inverse, core_inverse, pseudo_core):
        assert np.allclose(fn(INV)[0], want)
    assert np.allclose(drazin(INV)[0].drazin, want)


def test_adjoint_pseudo_core():
    a = gen_star_dmp(GenSpec(5, 3, 8))
    assert adjoint_pseudo_core_agrees(a)
    # the identity without the outer adjoint already fails on a 1x1 complex scalar
    x = np.array([[1j]])
    assert not np.allclose(pseudo_core(x.conj().T)[0], pseudo_core(x)[0])
    assert adjoint_pseudo_core_agrees(x)


def test_certification_threshold():
    assert certification_threshold(identity(2), 0) == pytest.approx(2e-7)
    assert certification_threshold(2 * identity(2), 3) == pytest.approx(1e-7 * 17)
