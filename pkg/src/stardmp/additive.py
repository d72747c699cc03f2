"""Additive and perturbation results for *-DMP matrices.

Each ``*_verify`` / ``*_check`` function evaluates a theorem's hypotheses and
both sides of its conclusion on a concrete instance and returns a
:class:`TheoremVerdict`. Two conventions apply throughout:

* An existential "for some m >= max{...}" is searched over
  ``[max(1, indices), that bound + dimension]``.
* A sum condition is judged with :func:`vanishes` against a scale that bounds
  the size of its terms, so m-fold products are not held to a bare ``eq_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geninv import (
    _drazin_residuals,
    certification_threshold,
    drazin,
    is_EP,
    is_projection,
    is_star_dmp,
)
from .matcore import (
    DEFAULT_TOL,
    CMatrix,
    NumericalFailure,
    ShapeError,
    StarDMPError,
    Tolerance,
    _square,
    as_cmatrix,
    identity,
    inverse,
    norm,
    vanishes,
)


class NotAProjection(StarDMPError, ValueError):
    pass


class NotCommuting(StarDMPError, ValueError):
    pass


@dataclass(frozen=True)
class PierceDecomposition:
    """Blocks ``p a p``, ``p a p'``, ``p' a p``, ``p' a p'`` with ``p' = I - p``, at full size."""

    p: CMatrix
    a11: CMatrix
    a12: CMatrix
    a21: CMatrix
    a22: CMatrix

    def reconstruct(self) -> CMatrix:
        return self.a11 + self.a12 + self.a21 + self.a22


@dataclass
class TheoremVerdict:
    theorem_id: str
    hypotheses: dict[str, bool] = field(default_factory=dict)
    hypothesis_residuals: dict[str, float] = field(default_factory=dict)
    side1: bool = False
    side2: bool = True
    witness_m: Optional[int] = None
    one_directional: bool = False
    consistent: bool = True
    residuals: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypotheses.values())

    @property
    def broken(self) -> list[str]:
        return [k for k, v in self.hypotheses.items() if not v]

    @property
    def equivalence_ok(self) -> Optional[bool]:
        if self.one_directional:
            return (not self.hypotheses_hold) or self.side1
        if not self.hypotheses_hold:
            return None
        return self.side1 == self.side2

    def to_json(self) -> dict:
        residuals = dict(self.hypothesis_residuals)
        residuals.update(self.residuals)
        return {
            "theorem": self.theorem_id,
            "hypotheses_hold": self.hypotheses_hold,
            "hypotheses": dict(self.hypotheses),
            "broken": self.broken,
            "side1": self.side1,
            "side2": self.side2,
            "witness_m": self.witness_m,
            "equivalence_ok": self.equivalence_ok,
            "one_directional": self.one_directional,
            "consistent": self.consistent,
            "residuals": {k: float(v) for k, v in residuals.items()},
            "notes": list(self.notes),
        }


class _Evaluator:
    """Collects hypothesis flags and tracks characterization consistency."""

    def __init__(self, verdict: TheoremVerdict, tol: Tolerance):
        self.v = verdict
        self.tol = tol

    def dmp(self, x: CMatrix, scale: Optional[float] = None) -> bool:
        rep = is_star_dmp(x, self.tol, scale)
        if not rep.consistent:
            self.v.consistent = False
        return rep.verdict

    def ep(self, x: CMatrix, scale: Optional[float] = None) -> bool:
        return is_EP(x, self.tol, scale)

    def flag(self, label: str, value: bool):
        self.v.hypotheses[label] = bool(value)

    def zero(self, label: str, value: CMatrix, scale: float):
        self.v.hypothesis_residuals[label] = norm(value)
        self.v.hypotheses[label] = vanishes(value, scale, self.tol)

    def equal(self, label: str, lhs: CMatrix, rhs: CMatrix, scale: float):
        self.zero(label, lhs - rhs, scale)


def _scale(*mats: CMatrix) -> float:
    """Bound on the max-abs entry of a product of ``mats``."""
    n = mats[0].shape[0]
    out = float(n) ** (len(mats) - 1)
    for m in mats:
        out *= norm(m)
    return out


def _op_scale(*mats: CMatrix) -> float:
    """Product of spectral norms: the rank reference for a computed product."""
    out = 1.0
    for m in mats:
        out *= float(np.linalg.norm(m, 2))
    return out


def _pi_scale(a: CMatrix, ad: CMatrix) -> float:
    """Size of the terms of ``a^pi = I - a a^D``; ``a^pi`` itself may be pure roundoff."""
    return 1.0 + _op_scale(a, ad)


def _same_square(*mats: CMatrix) -> list[CMatrix]:
    out = [_square(m) for m in mats]
    if len({m.shape for m in out}) != 1:
        raise ShapeError("operands must share one square shape")
    return out


def _search(lo: int, hi: int, ok: Callable[[int], bool]) -> Optional[int]:
    for m in range(lo, hi + 1):
        if ok(m):
            return m
    return None


# -- primitives --------------------------------------------------------------


def pierce(a: CMatrix, p: CMatrix, tol: Tolerance = DEFAULT_TOL) -> PierceDecomposition:
    a, p = _same_square(a, p)
    if not is_projection(p, tol):
        raise NotAProjection("p must be Hermitian and idempotent")
    q = identity(p.shape[0]) - p
    return PierceDecomposition(p, p @ a @ p, p @ a @ q, q @ a @ p, q @ a @ q)


def commutator(x: CMatrix, y: CMatrix) -> CMatrix:
    x, y = _same_square(x, y)
    return x @ y - y @ x


def b_m_sum(a: CMatrix, b: CMatrix, d: CMatrix, m: int) -> CMatrix:
    """``sum_{i=1}^m a^(i-1) b d^(m-i)``: the corner block of ``[[a, b], [0, d]]^m``."""
    a, d, b = _square(a), _square(d), as_cmatrix(b)
    if b.shape != (a.shape[0], d.shape[0]):
        raise ShapeError("b must be conformal with a and d")
    if m < 1:
        raise ValueError("m must be positive")
    apow = [identity(a.shape[0])]
    dpow = [identity(d.shape[0])]
    for _ in range(m - 1):
        apow.append(apow[-1] @ a)
        dpow.append(dpow[-1] @ d)
    return sum(apow[i - 1] @ b @ dpow[m - i] for i in range(1, m + 1))


def b_m_recurrence(a: CMatrix, b: CMatrix, d: CMatrix, m: int) -> CMatrix:
    """Same quantity through ``b_1 = b``, ``b_m = a b_(m-1) + b d^(m-1)``."""
    out = as_cmatrix(b)
    dpow = identity(d.shape[0])
    for _ in range(m - 1):
        dpow = dpow @ d
        out = a @ out + b @ dpow
    return out


def block_upper(a: CMatrix, b: CMatrix, d: CMatrix) -> CMatrix:
    a, d, b = _square(a), _square(d), as_cmatrix(b)
    if b.shape != (a.shape[0], d.shape[0]):
        raise ShapeError("b must be conformal with a and d")
    return np.block([[a, b], [np.zeros((d.shape[0], a.shape[0]), dtype=np.complex128), d]])


def triangular_drazin(a: CMatrix, b: CMatrix, d: CMatrix, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """Drazin inverse of ``[[a, b], [0, d]]`` assembled from the blocks.

    The corner block is
    ``sum_{n<i(d)} (a^D)^(n+2) b d^pi d^n + sum_{n<i(a)} a^n a^pi b (d^D)^(n+2) - a^D b d^D``.
    """
    a, b, d = _square(a), as_cmatrix(b), _square(d)
    x = block_upper(a, b, d)
    ra, _ = drazin(a, tol)
    rd, _ = drazin(d, tol)
    ad, dd = ra.drazin, rd.drazin
    z = -ad @ b @ dd
    left = ad @ ad
    right = identity(d.shape[0])
    for _ in range(rd.index):
        z = z + left @ b @ rd.spectral_idempotent @ right
        left = left @ ad
        right = right @ d
    left = identity(a.shape[0])
    right = dd @ dd
    for _ in range(ra.index):
        z = z + left @ ra.spectral_idempotent @ b @ right
        left = left @ a
        right = right @ dd
    out = block_upper(ad, z, dd)
    k = drazin(x, tol)[0].index
    worst = max(_drazin_residuals(x, out, k).values())
    if worst > certification_threshold(x, k):
        raise NumericalFailure(f"triangular Drazin formula residual {worst:.3g}")
    return out


# -- triangular block criterion ----------------------------------------------


def lemma22_check(a: CMatrix, b: CMatrix, d: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """``[[a, b], [0, d]]`` is *-DMP iff a, d are and the corner sums vanish.

    Two forms of the sums are evaluated. The proof form,
    ``a^pi b_m = 0`` and ``b_m d^pi = 0`` with ``b_m = sum a^(i-1) b d^(m-i)``,
    decides ``side2``. The form with exponents shifted by one,
    ``sum a^(m-i) b d^i d^pi`` and ``sum a^i a^pi b d^(m-i)``, is only logged.
    """
    a, b, d = _square(a), as_cmatrix(b), _square(d)
    x = block_upper(a, b, d)
    v = TheoremVerdict("L2.2")
    ev = _Evaluator(v, tol)
    ra, _ = drazin(a, tol)
    rd, _ = drazin(d, tol)
    v.side1 = ev.dmp(x)
    blocks_ok = ev.dmp(a) & ev.dmp(d)

    lo = max(1, ra.index, rd.index)
    hi = lo + x.shape[0]
    pscale = max(1.0, norm(ra.spectral_idempotent), norm(rd.spectral_idempotent))
    an = [norm(np.linalg.matrix_power(a, j)) for j in range(hi + 1)]
    dn = [norm(np.linalg.matrix_power(d, j)) for j in range(hi + 1)]

    def scale(m):
        terms = sum(an[i - 1] * dn[m - i] + an[i] * dn[m - i] + an[m - i] * dn[i] for i in range(1, m + 1))
        return x.shape[0] ** 2 * terms * norm(b) * pscale

    def proof_ok(m):
        bm = b_m_sum(a, b, d, m)
        s1 = bm @ rd.spectral_idempotent
        s2 = ra.spectral_idempotent @ bm
        v.residuals[f"proof_sum1[m={m}]"] = norm(s1)
        v.residuals[f"proof_sum2[m={m}]"] = norm(s2)
        return vanishes(s1, scale(m), tol) and vanishes(s2, scale(m), tol)

    def statement_ok(m):
        apow = [np.linalg.matrix_power(a, j) for j in range(m + 1)]
        dpow = [np.linalg.matrix_power(d, j) for j in range(m + 1)]
        s1 = sum(apow[m - i] @ b @ dpow[i] @ rd.spectral_idempotent for i in range(1, m + 1))
        s2 = sum(apow[i] @ ra.spectral_idempotent @ b @ dpow[m - i] for i in range(1, m + 1))
        return vanishes(s1, scale(m), tol) and vanishes(s2, scale(m), tol)

    m_proof = _search(lo, hi, proof_ok)
    m_stmt = _search(lo, hi, statement_ok)
    v.side2 = blocks_ok and m_proof is not None
    v.witness_m = m_proof if v.side2 else None
    if (m_proof is None) != (m_stmt is None):
        v.notes.append("sum_forms_disagree")
    return v


# -- orthogonal perturbations -------------------------------------------------


def lemma21_verify(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """If a, b are *-DMP with ``ab = ba = 0`` and ``a* b = 0`` then ``a + b`` is *-DMP."""
    a, b = _same_square(a, b)
    v = TheoremVerdict("L2.1", one_directional=True)
    ev = _Evaluator(v, tol)
    ev.flag("a_dmp", ev.dmp(a))
    ev.flag("b_dmp", ev.dmp(b))
    s = _scale(a, b)
    ev.zero("ab=0", a @ b, s)
    ev.zero("ba=0", b @ a, s)
    ev.zero("a*b=0", a.conj().T @ b, s)
    v.side1 = ev.dmp(a + b)
    return v


def _perturbed_sides(v: TheoremVerdict, ev: _Evaluator, a: CMatrix, b: CMatrix, group: bool):
    """Sides of the orthogonal / commuting perturbation theorems.

    With ``p = a a^D`` and ``x = a + b`` the hypotheses make ``x`` upper
    triangular relative to ``p``; ``side2`` asks that ``u = x p`` be *-DMP (EP
    when ``group``) and that the corner of ``x^m``,
    ``c_m = sum_{i=1}^m x^(i-1) [p, b] x^(m-i)``, satisfy
    ``u^pi c_m = 0`` and ``c_m w^pi = 0`` with ``w = a^pi x a^pi``.

    The sums as printed, ``sum x^(m-i) [p,b] (a^i + b^i) a^pi b^pi`` and
    ``sum x^i x^pi [p,b] (a^(m-i) + b^(m-i))``, are evaluated as well and any
    disagreement is noted.
    """
    tol = ev.tol
    n = a.shape[0]
    x = a + b
    ra, _ = drazin(a, tol)
    rx, _ = drazin(x, tol)
    rb, _ = drazin(b, tol)
    p = a @ ra.drazin
    api = ra.spectral_idempotent
    k = p @ b - b @ p
    u = x @ p
    u_scale = _op_scale(x, a, ra.drazin)
    ru, _ = drazin(u, tol, scale=u_scale)
    w = api @ x @ api
    rw, _ = drazin(w, tol, scale=_pi_scale(a, ra.drazin) ** 2 * _op_scale(x))
    v.side1 = ev.ep(x) if group else ev.dmp(x)
    u_ok = ev.ep(u, u_scale) if group else ev.dmp(u, u_scale)

    lo = max(1, ra.index, rx.index)
    hi = lo + n
    pscale = max(
        1.0,
        norm(api),
        norm(rb.spectral_idempotent),
        norm(rx.spectral_idempotent),
        norm(ru.spectral_idempotent),
        norm(rw.spectral_idempotent),
    )
    xpow = [identity(n)]
    apow = [identity(n)]
    bpow = [identity(n)]
    for _ in range(hi):
        xpow.append(xpow[-1] @ x)
        apow.append(apow[-1] @ a)
        bpow.append(bpow[-1] @ b)
    xn = [norm(t) for t in xpow]
    abn = [max(norm(s), norm(t)) for s, t in zip(apow, bpow)]

    def scale(m):
        terms = sum(
            xn[i - 1] * xn[m - i] + xn[m - i] * abn[i] + xn[i] * abn[m - i] for i in range(1, m + 1)
        )
        return n**3 * terms * norm(k) * pscale**2

    def corrected_ok(m):
        cm = sum(xpow[i - 1] @ k @ xpow[m - i] for i in range(1, m + 1))
        s1 = cm @ rw.spectral_idempotent
        s2 = ru.spectral_idempotent @ cm
        v.residuals[f"sum1[m={m}]"] = norm(s1)
        v.residuals[f"sum2[m={m}]"] = norm(s2)
        return vanishes(s1, scale(m), tol) and vanishes(s2, scale(m), tol)

    def printed_ok(m):
        tail = api @ rb.spectral_idempotent
        s1 = sum(xpow[m - i] @ k @ (apow[i] + bpow[i]) @ tail for i in range(1, m + 1))
        s2 = sum(
            xpow[i] @ rx.spectral_idempotent @ k @ (apow[m - i] + bpow[m - i])
            for i in range(1, m + 1)
        )
        return vanishes(s1, scale(m), tol) and vanishes(s2, scale(m), tol)

    m_fix = _search(lo, hi, corrected_ok)
    m_print = _search(lo, hi, printed_ok)
    v.side2 = u_ok and m_fix is not None
    v.witness_m = m_fix if v.side2 else None
    if (m_fix is None) != (m_print is None):
        v.notes.append("printed_sums_disagree")


def thm23_verify(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """Orthogonal perturbation: ``a^pi a b = a^pi b a = a^pi a* b = 0``."""
    a, b = _same_square(a, b)
    v = TheoremVerdict("T2.3")
    ev = _Evaluator(v, tol)
    ra, _ = drazin(a, tol)
    api = ra.spectral_idempotent
    ev.flag("a_dmp", ev.dmp(a))
    ev.flag("b_dmp", ev.dmp(b))
    ev.flag("a^pi b_dmp", ev.dmp(api @ b, _pi_scale(a, ra.drazin) * _op_scale(b)))
    s = _scale(api, a, b)
    ev.zero("a^pi a b=0", api @ a @ b, s)
    ev.zero("a^pi b a=0", api @ b @ a, s)
    ev.zero("a^pi a* b=0", api @ a.conj().T @ b, s)
    _perturbed_sides(v, ev, a, b, group=False)
    return v


def cor24_verify(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """EP version of :func:`thm23_verify` under ``a^pi b a = 0``.

    When ``a`` has no group inverse the hypothesis ``a_EP`` simply fails and
    ``a^D`` stands in for ``a^#`` in the sides.
    """
    a, b = _same_square(a, b)
    v = TheoremVerdict("C2.4")
    ev = _Evaluator(v, tol)
    ra, _ = drazin(a, tol)
    api = ra.spectral_idempotent
    ev.flag("a_EP", ev.ep(a))
    ev.flag("b_EP", ev.ep(b))
    ev.flag("a^pi b_EP", ev.ep(api @ b, _pi_scale(a, ra.drazin) * _op_scale(b)))
    ev.zero("a^pi b a=0", api @ b @ a, _scale(api, b, a))
    _perturbed_sides(v, ev, a, b, group=True)
    return v


# -- commuting perturbations --------------------------------------------------


def lemma31_verify(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """If a, b are *-DMP with ``ab = ba`` and ``a* b = b a*`` then ``ab`` is *-DMP."""
    a, b = _same_square(a, b)
    v = TheoremVerdict("L3.1", one_directional=True)
    ev = _Evaluator(v, tol)
    ev.flag("a_dmp", ev.dmp(a))
    ev.flag("b_dmp", ev.dmp(b))
    s = _scale(a, b)
    ev.equal("ab=ba", a @ b, b @ a, s)
    ev.equal("a*b=ba*", a.conj().T @ b, b @ a.conj().T, s)
    v.side1 = ev.dmp(a @ b, _op_scale(a, b))
    return v


def drazin_add_commuting(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """``(a+b)^D = (1 + a^D b)^D a^D + b^D (1 + a a^pi b^D)^-1 a^pi`` for commuting a, b."""
    a, b = _same_square(a, b)
    n = a.shape[0]
    if not vanishes(a @ b - b @ a, _scale(a, b), tol):
        raise NotCommuting("a and b do not commute")
    ra, _ = drazin(a, tol)
    rb, _ = drazin(b, tol)
    ad, api, bd = ra.drazin, ra.spectral_idempotent, rb.drazin
    one = identity(n)
    first = drazin(one + ad @ b, tol)[0].drazin @ ad
    second = bd @ inverse(one + a @ api @ bd, tol) @ api
    out = first + second
    s = a + b
    k = drazin(s, tol)[0].index
    worst = max(_drazin_residuals(s, out, k).values())
    if worst > certification_threshold(s, k):
        raise NumericalFailure(f"commuting sum formula residual {worst:.3g}")
    return out


def thm32_verify(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """Commuting perturbation: a + b is *-DMP iff ``1 + a^D b`` is."""
    a, b = _same_square(a, b)
    n = a.shape[0]
    v = TheoremVerdict("T3.2")
    ev = _Evaluator(v, tol)
    ev.flag("a_dmp", ev.dmp(a))
    ev.flag("b_dmp", ev.dmp(b))
    s = _scale(a, b)
    ev.equal("ab=ba", a @ b, b @ a, s)
    ev.equal("a*b=ba*", a.conj().T @ b, b @ a.conj().T, s)

    ra, _ = drazin(a, tol)
    rb, _ = drazin(b, tol)
    rs, _ = drazin(a + b, tol)
    c = identity(n) + ra.drazin @ b
    rc, _ = drazin(c, tol)
    v.side1 = ev.dmp(a + b)
    v.side2 = ev.dmp(c)
    ident = (
        rs.spectral_idempotent
        - a @ ra.drazin @ rc.spectral_idempotent
        - ra.spectral_idempotent @ rb.spectral_idempotent
    )
    v.residuals["projector_identity"] = norm(ident)
    if v.hypotheses["ab=ba"]:
        try:
            v.residuals["sum_formula"] = norm(drazin_add_commuting(a, b, tol) - rs.drazin)
        except StarDMPError as exc:
            v.notes.append(f"sum_formula_failed: {exc}")
    return v


def thm33_verify(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """Commuting-modulo-``a^pi`` perturbation, same sides as :func:`thm23_verify`."""
    a, b = _same_square(a, b)
    v = TheoremVerdict("T3.3")
    ev = _Evaluator(v, tol)
    ra, _ = drazin(a, tol)
    api = ra.spectral_idempotent
    ev.flag("a_dmp", ev.dmp(a))
    ev.flag("b_dmp", ev.dmp(b))
    ev.flag("a^pi b_dmp", ev.dmp(api @ b, _pi_scale(a, ra.drazin) * _op_scale(b)))
    astar = a.conj().T
    s = _scale(api, a, b)
    ev.equal("a^pi ab=a^pi ba", api @ a @ b, api @ b @ a, s)
    ev.equal("a^pi a*b=a^pi ba*", api @ astar @ b, api @ b @ astar, s)
    _perturbed_sides(v, ev, a, b, group=False)
    return v


def cor34_verify(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    """For commuting a, b with ``a^pi a* b = a^pi b a*``: a + b is *-DMP iff ``(a+b) a a^D`` is."""
    a, b = _same_square(a, b)
    v = TheoremVerdict("C3.4")
    ev = _Evaluator(v, tol)
    ra, _ = drazin(a, tol)
    api = ra.spectral_idempotent
    ev.flag("a_dmp", ev.dmp(a))
    ev.flag("b_dmp", ev.dmp(b))
    astar = a.conj().T
    ev.equal("ab=ba", a @ b, b @ a, _scale(a, b))
    ev.equal("a^pi a*b=a^pi ba*", api @ astar @ b, api @ b @ astar, _scale(api, a, b))
    p = a @ ra.drazin
    v.residuals["[aa^D,b]"] = norm(p @ b - b @ p)
    v.side1 = ev.dmp(a + b)
    v.side2 = ev.dmp((a + b) @ p, _op_scale(a + b, a, ra.drazin))
    return v
