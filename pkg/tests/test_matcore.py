import numpy as np
import pytest

from conftest import J2, diag
from stardmp.matcore import (
    DEFAULT_TOL,
    MatrixFormatError,
    ShapeError,
    Singular,
    Tolerance,
    adjoint,
    approx_eq,
    as_cmatrix,
    from_json,
    identity,
    inverse,
    is_hermitian,
    is_idempotent,
    is_nilpotent,
    mat_pow,
    norm,
    rank,
    to_json,
    vanishes,
)


def test_defaults():
    assert DEFAULT_TOL.eq_tol == 1e-9
    assert DEFAULT_TOL.rank_rel == 1e-10
    with pytest.raises(ValueError):
        Tolerance(-1.0, 1e-10)


def test_adjoint():
    assert np.array_equal(adjoint(identity(2)), identity(2))
    assert np.array_equal(adjoint(J2), J2.T)
    assert adjoint([[1j]])[0, 0] == -1j


def test_mat_pow():
    assert np.array_equal(mat_pow(J2, 2), np.zeros((2, 2)))
    assert np.array_equal(mat_pow(diag(2, 3), 0), identity(2))
    assert np.allclose(mat_pow(diag(2, 3), 3), diag(8, 27))
    with pytest.raises(ValueError):
        mat_pow(J2, -1)


def test_rank():
    assert rank(identity(3)) == 3
    assert rank(np.zeros((2, 2))) == 0
    assert rank([[1, 1], [0, 0]]) == 1
    assert rank(np.ones((2, 5))) == 1


def test_rank_scale_only_raises_the_cutoff():
    tiny = 1e-17 * identity(2)
    assert rank(tiny) == 2
    assert rank(tiny, scale=1.0) == 0
    assert rank(identity(2), scale=1e-30) == 2


def test_inverse():
    assert np.allclose(inverse(diag(2, 4)), diag(0.5, 0.25))
    with pytest.raises(Singular):
        inverse(J2)
    q, _ = np.linalg.qr(np.array([[1, 2j], [3, 4]]))
    assert np.allclose(inverse(q), adjoint(q))


def test_approx_eq():
    a = np.array([[1, 2], [3, 4j]])
    assert approx_eq(a, a)
    assert approx_eq(identity(2), identity(2) + 1e-15 * identity(2))
    assert not approx_eq(identity(2), 2 * identity(2))
    with pytest.raises(ShapeError):
        approx_eq(identity(2), identity(3))


def test_vanishes_is_scaled():
    x = 1e-6 * identity(2)
    assert not vanishes(x, 1.0)
    assert vanishes(x, 1e4)


def test_predicates():
    assert is_nilpotent(J2)
    assert not is_hermitian([[1, 1], [0, 0]])
    assert is_idempotent(diag(1, 0))
    assert not is_nilpotent(diag(1, 0))


def test_norm_is_max_abs_entry():
    assert norm(np.array([[3, -4j], [1, 0]])) == 4.0


def test_as_cmatrix_rejects_bad_input():
    with pytest.raises(ShapeError):
        as_cmatrix([1, 2, 3])
    with pytest.raises(ValueError):
        as_cmatrix([[np.nan]])
    with pytest.raises(ShapeError):
        mat_pow(np.ones((2, 3)), 2)


def test_json_round_trip():
    a = np.array([[1 + 2j, -0.5], [0, 3j], [7, 1e-300]])
    obj = to_json(a)
    assert obj["rows"] == 3 and obj["cols"] == 2
    assert obj["data"][0] == [1.0, 2.0]
    assert np.array_equal(from_json(obj), a)


@pytest.mark.parametrize(
    "obj",
    [
        [],
        {"rows": 1, "cols": 1},
        {"rows": 0, "cols": 1, "data": []},
        {"rows": 1, "cols": 2, "data": [[1, 0]]},
        {"rows": 1, "cols": 1, "data": [[1]]},
        {"rows": 1, "cols": 1, "data": [["1", 0]]},
        {"rows": 1, "cols": 1, "data": [[True, 0]]},
        {"rows": True, "cols": 1, "data": [[1, 0]]},
        {"rows": 1, "cols": 1, "data": [[float("inf"), 0]]},
    ],
)
def test_from_json_rejects(obj):
    with pytest.raises(MatrixFormatError):
        from_json(obj)
