"""*-DMP decisions for 2x2 block matrices ``M = [[A, B], [C, D]]`` with n x n blocks.

Every check folds the standing requirement that A, D, BC and CB are *-DMP into
its hypotheses. All results here are one-directional: when the hypotheses
hold, ``M`` must be *-DMP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .additive import TheoremVerdict, _Evaluator, _op_scale, _scale, _search
from .geninv import drazin
from .matcore import DEFAULT_TOL, CMatrix, ShapeError, Tolerance, as_cmatrix, from_json, is_nilpotent, norm, to_json, vanishes


@dataclass(frozen=True)
class BlockMatrix:
    A: CMatrix
    B: CMatrix
    C: CMatrix
    D: CMatrix

    def __post_init__(self):
        blocks = [as_cmatrix(x) for x in (self.A, self.B, self.C, self.D)]
        n = blocks[0].shape[0]
        if any(x.shape != (n, n) for x in blocks):
            raise ShapeError("all four blocks must be square of one size")
        for name, x in zip("ABCD", blocks):
            object.__setattr__(self, name, x)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def split(cls, m: CMatrix) -> "BlockMatrix":
        m = as_cmatrix(m)
        if m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ShapeError("need a square matrix of even size")
        n = m.shape[0] // 2
        return cls(m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:])

    def to_json(self) -> dict:
        return {k: to_json(getattr(self, k)) for k in "ABCD"}

    @classmethod
    def from_json(cls, obj: dict) -> "BlockMatrix":
        return cls(*(from_json(obj[k]) for k in "ABCD"))


def assemble(m: BlockMatrix) -> CMatrix:
    return np.block([[m.A, m.B], [m.C, m.D]])


def swap_conjugate(m: BlockMatrix) -> BlockMatrix:
    """Blocks of ``S M S`` with ``S = [[0, I], [I, 0]]``, i.e. ``(D, C, B, A)``."""
    return BlockMatrix(m.D, m.C, m.B, m.A)


def swap_matrix(n: int) -> CMatrix:
    z = np.zeros((n, n), dtype=np.complex128)
    i = np.eye(n, dtype=np.complex128)
    return np.block([[z, i], [i, z]])


def _preamble(ev: _Evaluator, m: BlockMatrix):
    ev.flag("A_dmp", ev.dmp(m.A))
    ev.flag("D_dmp", ev.dmp(m.D))
    s = _op_scale(m.B, m.C)
    ev.flag("BC_dmp", ev.dmp(m.B @ m.C, s))
    ev.flag("CB_dmp", ev.dmp(m.C @ m.B, s))


def _nilpotent_product(ev: _Evaluator, m: BlockMatrix):
    ad = drazin(m.A, ev.tol)[0].drazin
    dd = drazin(m.D, ev.tol)[0].drazin
    prod = ad @ m.B @ dd @ m.C
    ev.v.hypothesis_residuals["A^D B D^D C nilpotent"] = norm(np.linalg.matrix_power(prod, m.n))
    ev.flag("A^D B D^D C nilpotent", is_nilpotent(prod, ev.tol))


def lemma41_check(B: CMatrix, C: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """``[[0, B], [C, 0]]`` is *-DMP when BC and CB are."""
    B, C = as_cmatrix(B), as_cmatrix(C)
    z = np.zeros_like(B)
    m = BlockMatrix(z, B, C, z)
    v = TheoremVerdict("L4.1", one_directional=True)
    ev = _Evaluator(v, tol)
    s = _op_scale(B, C)
    ev.flag("BC_dmp", ev.dmp(B @ C, s))
    ev.flag("CB_dmp", ev.dmp(C @ B, s))
    q = assemble(m)
    v.residuals["Q^2=diag(BC,CB)"] = norm(q @ q - assemble(BlockMatrix(B @ C, z, z, C @ B)))
    v.side1 = ev.dmp(q)
    return v


def thm42_check(m: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """``AB = BD, DC = CA, A*B = BD*, D*C = CA*`` and ``A^D B D^D C`` nilpotent."""
    v = TheoremVerdict("T4.2", one_directional=True)
    ev = _Evaluator(v, tol)
    A, B, C, D = m.A, m.B, m.C, m.D
    _preamble(ev, m)
    s = _scale(A, B, C, D)
    ev.equal("AB=BD", A @ B, B @ D, s)
    ev.equal("DC=CA", D @ C, C @ A, s)
    ev.equal("A*B=BD*", A.conj().T @ B, B @ D.conj().T, s)
    ev.equal("D*C=CA*", D.conj().T @ C, C @ A.conj().T, s)
    _nilpotent_product(ev, m)
    v.side1 = ev.dmp(assemble(m))
    return v


def thm44_check(m: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """``AB = BD, DC = CA, B*A = DB*`` and ``A^D B D^D C`` nilpotent."""
    v = TheoremVerdict("T4.4", one_directional=True)
    ev = _Evaluator(v, tol)
    A, B, C, D = m.A, m.B, m.C, m.D
    _preamble(ev, m)
    s = _scale(A, B, C, D)
    ev.equal("AB=BD", A @ B, B @ D, s)
    ev.equal("DC=CA", D @ C, C @ A, s)
    ev.equal("B*A=DB*", B.conj().T @ A, D @ B.conj().T, s)
    _nilpotent_product(ev, m)
    v.side1 = ev.dmp(assemble(m))
    return v


def thm46_check(m: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """``BC = CB = 0, CA = DC, AC* = C*D`` plus the two corner sums.

    The sums ``sum_{i<=i(D)} A^(m-i) B D^(i-1) D^pi`` and
    ``sum_{i<=i(A)} A^(i-1) A^pi B D^(m-i)`` must vanish for one common
    ``m`` in ``[max(1, i(A), i(D)), that bound + n]``.
    """
    v = TheoremVerdict("T4.6", one_directional=True)
    ev = _Evaluator(v, tol)
    A, B, C, D = m.A, m.B, m.C, m.D
    n = m.n
    _preamble(ev, m)
    s = _scale(A, B, C, D)
    ev.zero("BC=0", B @ C, s)
    ev.zero("CB=0", C @ B, s)
    ev.equal("CA=DC", C @ A, D @ C, s)
    ev.equal("AC*=C*D", A @ C.conj().T, C.conj().T @ D, s)

    ra, _ = drazin(A, tol)
    rd, _ = drazin(D, tol)
    ia, id_ = ra.index, rd.index
    lo = max(1, ia, id_)
    hi = lo + n
    apow = [np.linalg.matrix_power(A, j) for j in range(hi + 1)]
    dpow = [np.linalg.matrix_power(D, j) for j in range(hi + 1)]
    pscale = max(1.0, norm(ra.spectral_idempotent), norm(rd.spectral_idempotent))
    worst = {}

    def ok(mm):
        s1 = sum(
            (apow[mm - i] @ B @ dpow[i - 1] @ rd.spectral_idempotent for i in range(1, id_ + 1)),
            np.zeros_like(B),
        )
        s2 = sum(
            (apow[i - 1] @ ra.spectral_idempotent @ B @ dpow[mm - i] for i in range(1, ia + 1)),
            np.zeros_like(B),
        )
        terms = sum(norm(apow[mm - i]) * norm(dpow[i - 1]) for i in range(1, id_ + 1)) + sum(
            norm(apow[i - 1]) * norm(dpow[mm - i]) for i in range(1, ia + 1)
        )
        scale = n**3 * terms * norm(B) * pscale
        worst[mm] = max(norm(s1), norm(s2))
        return vanishes(s1, scale, tol) and vanishes(s2, scale, tol)

    found = _search(lo, hi, ok)
    v.witness_m = found
    v.hypotheses["sums_vanish"] = found is not None
    v.hypothesis_residuals["sums_vanish"] = worst[found] if found is not None else min(worst.values())
    v.side1 = ev.dmp(assemble(m))
    return v


def _swapped(check, theorem_id: str, m: BlockMatrix, tol: Tolerance) -> TheoremVerdict:
    """Run ``check`` on the swap-conjugated blocks but decide *-DMP for ``M`` itself."""
    v = check(swap_conjugate(m), tol)
    v.theorem_id = theorem_id
    ev = _Evaluator(v, tol)
    own = ev.dmp(assemble(m))
    v.residuals["swap_verdicts_agree"] = float(own != v.side1)
    if own != v.side1:
        v.notes.append("swap_conjugate_changed_verdict")
    v.side1 = own
    return v


def cor43_check(m: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    return _swapped(thm42_check, "C4.3", m, tol)


def cor45_check(m: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """Swapped-block form of :func:`thm44_check`: needs ``C*D = AC*`` instead of ``B*A = DB*``."""
    return _swapped(thm44_check, "C4.5", m, tol)


def cor47_check(m: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """``BC = CB = 0, AB = BD, B*A = DB*`` with the sums over ``D^(m-i) C A^(i-1) A^pi``."""
    return _swapped(thm46_check, "C4.7", m, tol)
