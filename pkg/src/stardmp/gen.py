"""Seeded generators for matrices, pairs and block instances.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``. Instance ``i``
of a batch seeded with ``s`` uses ``SeedSequence([s, i])``; a rejected
attempt ``j`` of one instance moves on to ``SeedSequence([seed, j])`` with
``j = 1, 2, ...``. Equal :class:`GenSpec` values give bit-identical output.

Pair and block generators build instances in a common unitary frame so the
theorem hypotheses hold by construction, then re-verify them with the same
checkers used for verification and reject anything that does not pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .blockmat import BlockMatrix, swap_conjugate
from .geninv import drazin
from .matcore import CMatrix, StarDMPError, identity, norm, zeros
from .registry import check

MAX_ATTEMPTS = 64


class GenerationFailure(StarDMPError):
    pass


@dataclass(frozen=True)
class GenSpec:
    dim: int
    core_rank: int
    seed: int
    magnitude: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not 0 <= self.core_rank <= self.dim:
            raise ValueError("core_rank must lie in [0, dim]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.magnitude > 0:
            raise ValueError("magnitude must be positive")


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def batch_spec(seed: int, i: int, dim: int, magnitude: float = 1.0) -> GenSpec:
    """Spec of instance ``i`` in a batch; the core rank is drawn per instance."""
    rng = rng_for(seed, i)
    return GenSpec(dim, int(rng.integers(0, dim + 1)), int(rng.integers(0, 2**63)), magnitude)


# -- building blocks ---------------------------------------------------------


def complex_normal(rng: np.random.Generator, shape) -> CMatrix:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng: np.random.Generator, n: int) -> CMatrix:
    q, r = np.linalg.qr(complex_normal(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_invertible(rng: np.random.Generator, n: int, magnitude: float = 1.0) -> CMatrix:
    """Random entries, resampled until the smallest singular value is >= 0.1*magnitude."""
    if n == 0:
        return zeros(0)
    for _ in range(1000):
        t = magnitude * complex_normal(rng, (n, n)) / np.sqrt(n)
        if np.linalg.svd(t, compute_uv=False)[-1] >= 0.1 * magnitude:
            return t
    raise GenerationFailure("could not draw a well-conditioned block")


def random_nilpotent(rng: np.random.Generator, n: int, magnitude: float = 1.0) -> tuple[CMatrix, int]:
    """Strictly upper triangular nilpotent matrix and its nilpotency index.

    The matrix is block diagonal over a random partition of ``n`` into chains;
    each chain has superdiagonal entries of modulus in [0.5, 1]*magnitude, so
    its nilpotency index is exactly the length of its longest chain.
    """
    if n == 0:
        return zeros(0), 0
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    nil = zeros(n)
    start = 0
    for s in sizes:
        for i in range(start, start + s - 1):
            nil[i, i + 1] = magnitude * rng.uniform(0.5, 1.0) * np.exp(2j * np.pi * rng.uniform())
            for j in range(i + 2, start + s):
                nil[i, j] = 0.3 * magnitude * complex_normal(rng, ())
        start += s
    return nil, max(sizes)


def block_diag(*blocks: CMatrix) -> CMatrix:
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = zeros(n, m)
    i = j = 0
    for b in blocks:
        out[i : i + b.shape[0], j : j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def conj(u: CMatrix, x: CMatrix) -> CMatrix:
    return u @ x @ u.conj().T


class CoreNilpotent(NamedTuple):
    matrix: CMatrix
    frame: CMatrix
    core: CMatrix
    nilpotent: CMatrix
    nil_index: int


def core_nilpotent_parts(spec: GenSpec) -> CoreNilpotent:
    rng = rng_for(spec.seed, 0)
    u = random_unitary(rng, spec.dim)
    t = random_invertible(rng, spec.core_rank, spec.magnitude)
    nil, nu = random_nilpotent(rng, spec.dim - spec.core_rank, spec.magnitude)
    return CoreNilpotent(conj(u, block_diag(t, nil)), u, t, nil, nu)


# -- single matrices ---------------------------------------------------------


def gen_star_dmp(spec: GenSpec) -> CMatrix:
    """``U diag(T, N) U*`` with U unitary, T invertible, N nilpotent."""
    return core_nilpotent_parts(spec).matrix


def gen_ep(spec: GenSpec) -> CMatrix:
    """``U diag(T, 0) U*``: group invertible with a Hermitian ``a a^#``."""
    rng = rng_for(spec.seed, 0)
    u = random_unitary(rng, spec.dim)
    t = random_invertible(rng, spec.core_rank, spec.magnitude)
    return conj(u, block_diag(t, zeros(spec.dim - spec.core_rank)))


def random_similarity(rng: np.random.Generator, n: int, max_cond: float = 20.0) -> CMatrix:
    for _ in range(1000):
        s = complex_normal(rng, (n, n)) + identity(n)
        sv = np.linalg.svd(s, compute_uv=False)
        if sv[-1] > 0 and sv[0] / sv[-1] <= max_cond:
            return s
    raise GenerationFailure("could not draw a well-conditioned similarity")


def gen_oblique(spec: GenSpec) -> CMatrix:
    """``S diag(T, N) S^-1`` with a non-unitary S: arbitrary index, generally not *-DMP."""
    rng = rng_for(spec.seed, 0)
    s = random_similarity(rng, spec.dim)
    t = random_invertible(rng, spec.core_rank, spec.magnitude)
    nil, _ = random_nilpotent(rng, spec.dim - spec.core_rank, spec.magnitude)
    return s @ block_diag(t, nil) @ np.linalg.inv(s)


def gen_idempotent(spec: GenSpec) -> CMatrix:
    """Oblique idempotent ``S diag(I, 0) S^-1`` of rank ``core_rank``."""
    rng = rng_for(spec.seed, 0)
    s = random_similarity(rng, spec.dim)
    r = spec.core_rank
    return s @ block_diag(identity(r), zeros(spec.dim - r)) @ np.linalg.inv(s)


def gen_random(spec: GenSpec) -> CMatrix:
    """Unrestricted complex Gaussian matrix; rank ``core_rank`` when below ``dim``."""
    rng = rng_for(spec.seed, 0)
    n, r = spec.dim, spec.core_rank
    if r == n:
        return spec.magnitude * complex_normal(rng, (n, n))
    left = complex_normal(rng, (n, r))
    right = complex_normal(rng, (r, n))
    return spec.magnitude * left @ right / np.sqrt(max(r, 1))


def gen_rectangular(seed: int, rows: int, cols: int, rank: int | None = None) -> CMatrix:
    rng = rng_for(seed, 0)
    if rank is None or rank >= min(rows, cols):
        return complex_normal(rng, (rows, cols))
    return complex_normal(rng, (rows, rank)) @ complex_normal(rng, (rank, cols))


# -- theorem instances ---------------------------------------------------------


def _first_valid(spec: GenSpec, build, accept, what: str):
    for j in range(MAX_ATTEMPTS):
        inst = build(rng_for(spec.seed, j))
        try:
            if accept(inst):
                return inst
        except StarDMPError:
            pass
    raise GenerationFailure(f"{what}: no verified instance in {MAX_ATTEMPTS} attempts (seed {spec.seed})")


def _hypotheses_ok(theorem_id: str):
    def accept(inst):
        v = check(theorem_id, inst)
        return v.hypotheses_hold and v.consistent

    return accept


def _frame(rng: np.random.Generator, n: int) -> CMatrix:
    return random_unitary(rng, n) if n else zeros(0)


def random_dmp(rng: np.random.Generator, n: int, magnitude: float = 1.0, core_rank: int | None = None) -> CMatrix:
    """``U diag(T, N) U*`` of size ``n``; the core rank is drawn when not given."""
    if n == 0:
        return zeros(0)
    r = int(rng.integers(0, n + 1)) if core_rank is None else core_rank
    t = random_invertible(rng, r, magnitude)
    nil, _ = random_nilpotent(rng, n - r, magnitude)
    return conj(_frame(rng, n), block_diag(t, nil))


def random_ep(rng: np.random.Generator, n: int, rank: int, magnitude: float = 1.0) -> CMatrix:
    if n == 0:
        return zeros(0)
    return conj(_frame(rng, n), block_diag(random_invertible(rng, rank, magnitude), zeros(n - rank)))


def _core_projector(x: CMatrix) -> tuple[CMatrix, CMatrix]:
    """``(x x^D, x^pi)``; empty blocks give empty projectors."""
    if x.shape[0] == 0:
        return zeros(0), zeros(0)
    res, _ = drazin(x)
    return x @ res.drazin, res.spectral_idempotent


def _coupling(rng: np.random.Generator, x: CMatrix, y: CMatrix, magnitude: float) -> CMatrix:
    """A corner ``c`` for which ``[[x, c], [0, y]]`` stays *-DMP: ``P_x Y P_y + x^pi Z y^pi``."""
    px, xpi = _core_projector(x)
    py, ypi = _core_projector(y)
    shape = (x.shape[0], y.shape[0])
    if 0 in shape:
        return zeros(*shape)
    return magnitude * (px @ complex_normal(rng, shape) @ py + xpi @ complex_normal(rng, shape) @ ypi)


def _upper(b1: CMatrix, b2: CMatrix, b4: CMatrix) -> CMatrix:
    out = block_diag(b1, b4)
    out[: b1.shape[0], b1.shape[0] :] = b2
    return out


def _eigen_shift(rng: np.random.Generator, t: CMatrix) -> complex:
    return complex(rng.choice(np.linalg.eigvals(t)))


def gen_lemma21_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """``a = U diag(A1, 0, 0) U*`` and ``b = U diag(0, B2, 0) U*`` with *-DMP A1, B2."""
    n = spec.dim
    if n < 2:
        raise ValueError("dim must be at least 2")

    def build(rng):
        n1 = int(rng.integers(1, n))
        n2 = int(rng.integers(0, n - n1 + 1))
        a1 = random_dmp(rng, n1, spec.magnitude)
        b2 = random_dmp(rng, n2, spec.magnitude)
        u = _frame(rng, n)
        a = conj(u, block_diag(a1, zeros(n - n1)))
        b = conj(u, block_diag(zeros(n1), b2, zeros(n - n1 - n2)))
        return a, b

    return _first_valid(spec, build, _hypotheses_ok("L2.1"), "L2.1")


def gen_lemma22_triple(spec: GenSpec, satisfy: bool | None = None) -> tuple[CMatrix, CMatrix, CMatrix]:
    """Triangular triple ``(a, b, d)`` of ``dim x dim`` blocks with *-DMP a and d.

    A satisfying corner is ``P_a Y P_d + a^pi Z d^pi``; a violating one is a
    plain random matrix against a singular ``a`` or ``d``. The requested label
    is checked before the triple is returned. ``satisfy=None`` draws the label.
    """
    n = spec.dim
    if satisfy is None:
        satisfy = bool(rng_for(spec.seed, MAX_ATTEMPTS).integers(2))

    def build(rng):
        ra = int(rng.integers(0, n + 1))
        rd = int(rng.integers(0, n + 1))
        if not satisfy and ra == n and rd == n:
            ra = int(rng.integers(0, n))
        a = random_dmp(rng, n, spec.magnitude, ra)
        d = random_dmp(rng, n, spec.magnitude, rd)
        if satisfy:
            b = _coupling(rng, a, d, spec.magnitude)
        else:
            b = spec.magnitude * complex_normal(rng, (n, n))
        return a, b, d

    def accept(inst):
        v = check("L2.2", inst)
        return v.consistent and v.side2 == satisfy and all(v.hypotheses.values())

    return _first_valid(spec, build, accept, "L2.2")


def _split_nilpotent(rng, spec: GenSpec):
    """Core T of size core_rank, a nilpotent N1 and a zero block of size s."""
    rest = spec.dim - spec.core_rank
    n1 = int(rng.integers(0, rest + 1))
    t = random_invertible(rng, spec.core_rank, spec.magnitude)
    nil, _ = random_nilpotent(rng, n1, spec.magnitude)
    return t, nil, rest - n1


def _top_block(rng, t: CMatrix, magnitude: float) -> CMatrix:
    """Usually a random *-DMP block; sometimes ``S - T`` with S singular EP, so that
    the top block of ``a + b`` is ``S`` and the pair tends to fail both sides."""
    r = t.shape[0]
    if r and rng.uniform() < 0.3:
        return random_ep(rng, r, int(rng.integers(0, r)), magnitude) - t
    return random_dmp(rng, r, magnitude)


def gen_thm23_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """Frame ``a = U diag(T, N1, 0) U*`` and ``b = U [[B1, B2], [0, diag(0, B4)]] U*``.

    ``a^pi a b``, ``a^pi b a`` and ``a^pi a* b`` vanish because the lower row
    of ``b`` lives on the zero block of ``a``. The corner B2 keeps ``b``
    *-DMP and is switched off in a quarter of the draws.
    """

    def build(rng):
        t, nil, s = _split_nilpotent(rng, spec)
        b4 = block_diag(zeros(nil.shape[0]), random_dmp(rng, s, spec.magnitude))
        return _assemble_pair(rng, spec, t, nil, s, b4)

    return _first_valid(spec, build, _hypotheses_ok("T2.3"), "T2.3")


def _assemble_pair(rng, spec, t, nil, s, b4):
    b1 = _top_block(rng, t, spec.magnitude)
    b2 = _coupling(rng, b1, b4, spec.magnitude)
    if rng.uniform() < 0.25:
        b2 = zeros(*b2.shape)
    u = _frame(rng, spec.dim)
    a = conj(u, block_diag(t, nil, zeros(s)))
    b = conj(u, _upper(b1, b2, b4))
    return a, b


def gen_thm33_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """As :func:`gen_thm23_pair` but with ``B4 = diag(beta I, B4')`` commuting with N1 and N1*."""

    def build(rng):
        t, nil, s = _split_nilpotent(rng, spec)
        beta = spec.magnitude * complex_normal(rng, ()) if rng.uniform() < 0.7 else 0.0
        b4 = block_diag(beta * identity(nil.shape[0]), random_dmp(rng, s, spec.magnitude))
        return _assemble_pair(rng, spec, t, nil, s, b4)

    return _first_valid(spec, build, _hypotheses_ok("T3.3"), "T3.3")


def gen_cor24_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """EP ``a = U diag(T, 0) U*`` and EP ``b = U [[B1, X V1*], [0, V diag(C, 0) V*]] U*``.

    In the basis ``(top, V)`` the matrix b is ``[[B1, X], [0, C]]`` plus a zero
    block, so it is EP whenever B1 and C are invertible.
    """
    n, r = spec.dim, spec.core_rank
    rest = n - r

    def build(rng):
        t = random_invertible(rng, r, spec.magnitude)
        q = int(rng.integers(0, rest + 1))
        c = random_invertible(rng, q, spec.magnitude)
        v = _frame(rng, rest)
        if r and rng.uniform() < 0.3:
            b1 = random_ep(rng, r, int(rng.integers(0, r)), spec.magnitude) - t
        else:
            b1 = random_invertible(rng, r, spec.magnitude)
        x = spec.magnitude * complex_normal(rng, (r, q)) if rng.uniform() < 0.75 else zeros(r, q)
        b2 = x @ v[:, :q].conj().T if rest else zeros(r, 0)
        b4 = conj(v, block_diag(c, zeros(rest - q))) if rest else zeros(0)
        u = _frame(rng, n)
        a = conj(u, block_diag(t, zeros(rest)))
        b = conj(u, _upper(b1, b2, b4))
        return a, b

    return _first_valid(spec, build, _hypotheses_ok("C2.4"), "C2.4")


def gen_cor34_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """``b = U diag(c0 I + c1 T, diag(beta I, B4')) U*``, commuting with a.

    Choosing ``c0 = -(1 + c1) lambda`` for an eigenvalue lambda of T makes
    the core of ``a + b`` singular, which usually breaks both sides.
    """

    def build(rng):
        t, nil, s = _split_nilpotent(rng, spec)
        r = t.shape[0]
        c1 = complex_normal(rng, ())
        if r and rng.uniform() < 0.3:
            c0 = -(1 + c1) * _eigen_shift(rng, t)
        else:
            c0 = spec.magnitude * complex_normal(rng, ())
        b1 = c0 * identity(r) + c1 * t
        beta = spec.magnitude * complex_normal(rng, ()) if rng.uniform() < 0.7 else 0.0
        b4 = block_diag(beta * identity(nil.shape[0]), random_dmp(rng, s, spec.magnitude))
        u = _frame(rng, spec.dim)
        return conj(u, block_diag(t, nil, zeros(s))), conj(u, block_diag(b1, b4))

    return _first_valid(spec, build, _hypotheses_ok("C3.4"), "C3.4")


def _composition(rng, n: int) -> list[int]:
    sizes = []
    while n:
        k = int(rng.integers(1, n + 1))
        sizes.append(k)
        n -= k
    return sizes


def gen_thm32_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """Commuting, *-commuting pair built block by block in one unitary frame.

    On each diagonal block one of a, b is a scalar multiple of the identity
    and the other is an arbitrary *-DMP block. Sometimes the scalar is minus
    an eigenvalue of the other block, which makes ``a + b`` singular there.
    """

    def build(rng):
        a_blocks, b_blocks = [], []
        for k in _composition(rng, spec.dim):
            x = random_dmp(rng, k, spec.magnitude)
            if rng.uniform() < 0.2 and np.abs(np.linalg.eigvals(x)).max() > 1e-3:
                lam = _eigen_shift(rng, x)
                while abs(lam) <= 1e-3:
                    lam = _eigen_shift(rng, x)
                c = -lam
            elif rng.uniform() < 0.2:
                c = 0.0
            else:
                c = spec.magnitude * complex_normal(rng, ())
            pair = (x, c * identity(k))
            if rng.uniform() < 0.5:
                pair = pair[::-1]
            a_blocks.append(pair[0])
            b_blocks.append(pair[1])
        u = _frame(rng, spec.dim)
        return conj(u, block_diag(*a_blocks)), conj(u, block_diag(*b_blocks))

    return _first_valid(spec, build, _hypotheses_ok("T3.2"), "T3.2")


def gen_lemma31_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """Same construction as :func:`gen_thm32_pair`; the two hypothesis sets coincide."""
    return gen_thm32_pair(spec)


def gen_lemma41_pair(spec: GenSpec) -> tuple[CMatrix, CMatrix]:
    """``(B, B*)``, or ``B = U diag(T1, 0) V*`` with ``C = V diag(T2, 0) U*``."""
    n = spec.dim

    def build(rng):
        r = int(rng.integers(0, n + 1))
        if rng.uniform() < 0.4:
            b = gen_random(GenSpec(n, r, int(rng.integers(0, 2**63)), spec.magnitude))
            return b, b.conj().T
        u, v = _frame(rng, n), _frame(rng, n)
        t1 = random_invertible(rng, r, spec.magnitude)
        t2 = random_invertible(rng, r, spec.magnitude)
        b = u @ block_diag(t1, zeros(n - r)) @ v.conj().T
        c = v @ block_diag(t2, zeros(n - r)) @ u.conj().T
        return b, c

    return _first_valid(spec, build, _hypotheses_ok("L4.1"), "L4.1")


# -- block instances -----------------------------------------------------------


def _scalar(rng, magnitude: float) -> complex:
    """Nonzero scalar with modulus in [0.5, 1]*magnitude and a uniform phase."""
    return magnitude * rng.uniform(0.5, 1.0) * np.exp(2j * np.pi * rng.uniform())


def _coordinate(rng, theorem_id: str, magnitude: float):
    """One diagonal coordinate ``(alpha, beta, gamma, delta)`` obeying the scalar hypotheses."""
    kind = int(rng.integers(3))
    draw = lambda: _scalar(rng, magnitude)
    if theorem_id == "T4.6":
        if kind == 0:
            alpha = draw() if rng.uniform() < 0.5 else 0.0
            beta, gamma = (draw(), 0.0) if rng.uniform() < 0.5 else (0.0, draw())
            return alpha, beta, gamma, alpha
        if kind == 1:
            return draw(), draw(), 0.0, draw()
        alpha, delta = (draw(), 0.0) if rng.uniform() < 0.5 else (0.0, draw())
        return alpha, 0.0, 0.0, delta
    # T4.2 / T4.4: coupling only where alpha = delta, and beta gamma = 0 unless alpha = 0
    if kind == 0:
        return 0.0, draw(), draw(), 0.0
    if kind == 1:
        alpha = draw()
        beta, gamma = (draw(), 0.0) if rng.uniform() < 0.5 else (0.0, draw())
        return alpha, beta, gamma, alpha
    return draw(), 0.0, 0.0, draw()


def _free_part(rng, theorem_id: str, f: int, magnitude: float):
    """Non-diagonal blocks ``(A_f, B_f, C_f, D_f)``, coupled through ``D_f = A_f``."""
    af = random_dmp(rng, f, magnitude)
    z = zeros(f)
    mode = int(rng.integers(3)) if f else 0
    if mode == 0:
        return af, z, z, random_dmp(rng, f, magnitude)
    c = _scalar(rng, magnitude)
    if theorem_id == "T4.6":
        return af, z, c * identity(f), af
    if mode == 1:
        return af, c * identity(f), z, af
    if theorem_id == "T4.4":
        return af, z, c * identity(f) + _scalar(rng, 1.0) * af, af
    return af, z, c * identity(f), af


def _block_instance(rng, theorem_id: str, spec: GenSpec, forced=None) -> BlockMatrix:
    n = spec.dim
    k = int(rng.integers(0, n + 1))
    if forced is not None:
        k = max(k, 1)
    coords = [_coordinate(rng, theorem_id, spec.magnitude) for _ in range(k)]
    if forced is not None:
        coords[int(rng.integers(k))] = forced(rng)
    alpha, beta, gamma, delta = (np.array([c[i] for c in coords], dtype=np.complex128) for i in range(4))
    af, bf, cf, df = _free_part(rng, theorem_id, n - k, spec.magnitude)
    u, v = _frame(rng, n), _frame(rng, n)
    uh, vh = u.conj().T, v.conj().T
    return BlockMatrix(
        u @ block_diag(np.diag(alpha), af) @ uh,
        u @ block_diag(np.diag(beta), bf) @ vh,
        v @ block_diag(np.diag(gamma), cf) @ uh,
        v @ block_diag(np.diag(delta), df) @ vh,
    )


_BLOCK_BASE = {"T4.2": "T4.2", "T4.4": "T4.4", "T4.6": "T4.6", "C4.3": "T4.2", "C4.5": "T4.4", "C4.7": "T4.6"}


def gen_block(theorem_id: str, spec: GenSpec) -> BlockMatrix:
    """Block instance for a section-4 result.

    ``A = U diag(alpha, A_f) U*``, ``B = U diag(beta, B_f) V*``,
    ``C = V diag(gamma, C_f) U*``, ``D = V diag(delta, D_f) V*`` with two
    independent unitaries, so every intertwining relation reduces to scalar
    conditions on the diagonal coordinates and to commutation on the free
    blocks. The C4.x ids return the swap-conjugate of an instance of the
    theorem they mirror.
    """
    if theorem_id not in _BLOCK_BASE:
        raise KeyError(f"no block generator for {theorem_id!r}")
    base = _BLOCK_BASE[theorem_id]
    m = _first_valid(spec, lambda rng: _block_instance(rng, base, spec), _hypotheses_ok(base), base)
    return m if base == theorem_id else swap_conjugate(m)


# -- dispatch ------------------------------------------------------------------


def generate(theorem_id: str, spec: GenSpec):
    """Verified hypothesis-satisfying instance for any theorem id."""
    pair_gens = {
        "L2.1": gen_lemma21_pair,
        "T2.3": gen_thm23_pair,
        "C2.4": gen_cor24_pair,
        "L3.1": gen_lemma31_pair,
        "T3.2": gen_thm32_pair,
        "T3.3": gen_thm33_pair,
        "C3.4": gen_cor34_pair,
        "L4.1": gen_lemma41_pair,
        "L2.2": gen_lemma22_triple,
    }
    if theorem_id in pair_gens:
        return pair_gens[theorem_id](spec)
    return gen_block(theorem_id, spec)


def min_dim(theorem_id: str) -> int:
    return {"L2.1": 2}.get(theorem_id, 1)


# -- near misses -----------------------------------------------------------------


class NearMiss(NamedTuple):
    theorem: str
    label: str
    instance: object
    eps: float


NEAR_MISS_LABELS = {
    "L2.1": "ab=0",
    "T2.3": "a^pi a* b=0",
    "L3.1": "a*b=ba*",
    "T3.2": "a*b=ba*",
    "T4.2": "A^D B D^D C nilpotent",
    "T4.4": "A^D B D^D C nilpotent",
    "T4.6": "sums_vanish",
}

NEAR_MISS_MIN_DIM = {"L2.1": 3, "T2.3": 2, "L3.1": 2, "T3.2": 2}


def _chain(rng, magnitude: float) -> CMatrix:
    """``c E12`` with ``|c|`` in [0.5, 1]*magnitude."""
    j = zeros(2)
    j[0, 1] = magnitude * rng.uniform(0.5, 1.0) * np.exp(2j * np.pi * rng.uniform())
    return j


def _near_l21(rng, spec: GenSpec, eps: float):
    # a carries a 2-chain e_q <- e_(q+1); the extra term maps the last basis
    # vector onto e_(q+1), which a* kills but a does not.
    n = spec.dim
    r = min(spec.core_rank, n - 3)
    n2 = n - r - 3
    a1 = block_diag(random_invertible(rng, r, spec.magnitude), _chain(rng, spec.magnitude))
    b2 = random_dmp(rng, n2, spec.magnitude)
    extra = zeros(n)
    extra[r + 1, n - 1] = eps * spec.magnitude
    u = _frame(rng, n)
    a = conj(u, block_diag(a1, zeros(n2 + 1)))
    b = conj(u, block_diag(zeros(r + 2), b2, zeros(1)) + extra)
    return a, b


def _near_t23(rng, spec: GenSpec, eps: float):
    n = spec.dim
    r = min(spec.core_rank, n - 2)
    s = n - r - 2
    j = _chain(rng, spec.magnitude)
    a = block_diag(random_invertible(rng, r, spec.magnitude), j, zeros(s))
    b = block_diag(random_dmp(rng, r, spec.magnitude), eps * j, random_dmp(rng, s, spec.magnitude))
    u = _frame(rng, n)
    return conj(u, a), conj(u, b)


def _near_t32(rng, spec: GenSpec, eps: float):
    n, r = spec.dim, spec.core_rank
    if r < 2 and n - r < 2:
        # every *-DMP matrix with a 1x1 core and a 1x1 nilpotent part is normal
        r = n
    a = random_dmp(rng, n, spec.magnitude, r)
    beta = spec.magnitude * np.exp(2j * np.pi * rng.uniform()) * (1 + norm(a))
    return a, beta * identity(spec.dim) + eps * a


def _forced_nilpotency(eps: float, magnitude: float, n: int):
    # Nilpotency is judged on the n-th power, so the coupling is eps**(1/n).
    def coord(rng):
        alpha = _scalar(rng, magnitude)
        return alpha, _scalar(rng, magnitude), eps ** (1.0 / n) * magnitude, alpha

    return coord


def _forced_sums(eps: float, magnitude: float):
    def coord(rng):
        return _scalar(rng, magnitude), eps * magnitude, 0.0, 0.0

    return coord


def gen_near_miss(theorem_id: str, spec: GenSpec, eps: float = 1e-3) -> NearMiss:
    """Instance that violates exactly the hypothesis ``NEAR_MISS_LABELS[theorem_id]``.

    A valid instance is perturbed by ``eps`` in one place. With ``eps = 0`` the
    instance satisfies every hypothesis. The labeled hypothesis is confirmed
    to fail (or, for ``eps = 0``, all hypotheses to hold) before returning.
    """
    if theorem_id not in NEAR_MISS_LABELS:
        raise KeyError(f"no near-miss construction for {theorem_id!r}")
    if spec.dim < NEAR_MISS_MIN_DIM.get(theorem_id, 1):
        raise ValueError(f"{theorem_id} near misses need dim >= {NEAR_MISS_MIN_DIM[theorem_id]}")
    label = NEAR_MISS_LABELS[theorem_id]
    if theorem_id == "L2.1":
        build = lambda rng: _near_l21(rng, spec, eps)
    elif theorem_id == "T2.3":
        build = lambda rng: _near_t23(rng, spec, eps)
    elif theorem_id in ("L3.1", "T3.2"):
        build = lambda rng: _near_t32(rng, spec, eps)
    elif theorem_id == "T4.6":
        build = lambda rng: _block_instance(rng, "T4.6", spec, _forced_sums(eps, spec.magnitude))
    else:
        build = lambda rng: _block_instance(rng, theorem_id, spec, _forced_nilpotency(eps, spec.magnitude, spec.dim))

    def accept(inst):
        v = check(theorem_id, inst)
        if eps == 0:
            return v.hypotheses_hold
        return label in v.broken

    return NearMiss(theorem_id, label, _first_valid(spec, build, accept, f"{theorem_id} near miss"), eps)
