"""Structure of finite-dimensional matrix algebras.

Structure constants, ideal and nilpotency tests, the characteristic-0
radical via the trace form, quotients, and matrix-unit certificates.
Semisimplicity in positive characteristic is only ever decided by an
explicit matrix-unit certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import (AlgebraBasis, ExactMatrix, FieldSpec, VectorSpaceBasis, _Echelon,
                     nullspace, stack)


# structure constants --------------------------------------------------------

@dataclass
class StructureConstants:
    """``tensor[i, j, k]`` with ``b_i b_j = sum_k tensor[i, j, k] b_k``.

    ``coordinates`` optionally maps an ambient matrix to its coordinate
    vector in this basis (for quotients it reduces modulo the ideal first).
    """

    field: FieldSpec
    tensor: ExactMatrix
    coordinates: Optional[Callable[[ExactMatrix], ExactMatrix]] = None
    representatives: Optional[List[ExactMatrix]] = None

    @property
    def dim(self) -> int:
        return self.tensor.shape[0] if self.tensor.ndim == 3 else 0

    def basis_vector(self, i: int) -> ExactMatrix:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return ExactMatrix(self.field, v)

    def product(self, x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
        """Product of two coordinate vectors."""
        if self.dim == 0:
            return x
        return x.tensordot(self.tensor, axes=([0], [0])).tensordot(y, axes=([0], [0]))

    def is_associative(self, triples: Optional[Sequence[Tuple[int, int, int]]] = None) -> bool:
        m = self.dim
        if m == 0:
            return True
        c = self.tensor
        if triples is None:
            # (b_i b_j) b_l = sum_k c[i,j,k] c[k,l,:] ; b_i (b_j b_l) = sum_k c[j,l,k] c[i,k,:]
            left = c.tensordot(c, axes=([2], [0]))  # i j l r
            right = c.tensordot(c, axes=([1], [2])).transpose(0, 2, 3, 1)  # i k r, j l k -> i j l r
            return left == right
        for i, j, l in triples:
            left = self.product(self.product(self.basis_vector(i), self.basis_vector(j)), self.basis_vector(l))
            right = self.product(self.basis_vector(i), self.product(self.basis_vector(j), self.basis_vector(l)))
            if left != right:
                return False
        return True

    # element interface used by verify_matrix_units
    def mul(self, x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
        return self.product(x, y)

    def is_zero(self, x: ExactMatrix) -> bool:
        return x.is_zero()

    def contains(self, x: ExactMatrix) -> bool:
        return x.shape == (self.dim,)

    def support(self, x) -> Tuple[int, int]:
        return -1, -1

    def element(self, x: ExactMatrix) -> ExactMatrix:
        """Accept coordinate vectors, or ambient matrices when a map exists."""
        if x.ndim == 1 and x.shape == (self.dim,):
            return x
        if self.coordinates is None:
            raise ValueError("element is not a coordinate vector of this algebra")
        return self.coordinates(x)


def structure_constants(a: AlgebraBasis) -> StructureConstants:
    mats = a.matrices()
    m = len(mats)
    if m == 0:
        return StructureConstants(a.field, ExactMatrix.zeros(a.field, (0, 0, 0)), a.coordinates, [])
    rows = []
    for x in mats:
        for y in mats:
            try:
                rows.append(a.coordinates(x @ y))
            except ValueError:
                raise ValueError("basis is not closed under multiplication") from None
    tensor = stack(a.field, rows).reshape(m, m, m)
    return StructureConstants(a.field, tensor, a.coordinates, mats)


# supports -------------------------------------------------------------------

def _supports(m: ExactMatrix) -> Tuple[np.ndarray, np.ndarray]:
    nz = m.num != 0
    return nz.any(axis=1), nz.any(axis=0)


def _mask(flags: np.ndarray) -> int:
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def support_masks(m: ExactMatrix) -> Tuple[int, int]:
    """Bitmasks of the nonzero rows and nonzero columns of ``m``."""
    rows, cols = _supports(m)
    return _mask(rows), _mask(cols)


def structurally_zero(x: ExactMatrix, y: ExactMatrix) -> bool:
    """True when no column used by ``x`` meets a row used by ``y``."""
    return not np.any(_supports(x)[1] & _supports(y)[0])


class MatrixAlgebraView:
    """A matrix algebra, optionally modulo a two-sided ideal.

    Elements are ambient n x n matrices; equality is taken modulo the ideal.
    """

    def __init__(self, algebra: AlgebraBasis, ideal: Optional[VectorSpaceBasis] = None):
        self.algebra = algebra
        self.ideal = ideal
        self.field = algebra.field

    @property
    def dim(self) -> int:
        return self.algebra.dim - (self.ideal.dim if self.ideal is not None else 0)

    def mul(self, x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
        return x @ y

    def is_zero(self, x: ExactMatrix) -> bool:
        if self.ideal is None or self.ideal.dim == 0:
            return x.is_zero()
        return self.ideal.contains(x.flat())

    def contains(self, x: ExactMatrix) -> bool:
        return x.shape == (self.algebra.n, self.algebra.n) and self.algebra.contains(x)

    def support(self, x: ExactMatrix) -> Tuple[int, int]:
        return support_masks(x)

    def element(self, x: ExactMatrix) -> ExactMatrix:
        return x


# ideals and nilpotency -------------------------------------------------------

def _as_matrices(sub: VectorSpaceBasis, n: int) -> List[ExactMatrix]:
    return [v.reshape(n, n) for v in sub.vectors()]


def is_two_sided_ideal(sub: VectorSpaceBasis, a: AlgebraBasis, exhaustive: bool = False) -> bool:
    """Whether ``sub`` is a two-sided ideal of ``a``.

    By default only the generators of ``a`` are used as multipliers; since
    ``a`` is spanned by words in its generators this is equivalent to using
    every basis element, which ``exhaustive=True`` does literally.
    """
    if sub.field != a.field or sub.ambient != a.n * a.n:
        raise ValueError("subspace does not live in the algebra's ambient space")
    if not a.space.contains_space(sub):
        raise ValueError("subspace is not inside the algebra")
    if sub.dim == 0:
        return True
    n = a.n
    multipliers = a.matrices() if exhaustive or not a.generators else list(a.generators)
    stacked = sub.rows.reshape(sub.dim, n, n)
    for b in multipliers:
        for prods in (b @ stacked, stacked @ b):
            if not sub.contains_all(prods.reshape(sub.dim, n * n)):
                return False
    return True


def subspace_product(x: VectorSpaceBasis, y: VectorSpaceBasis, n: int) -> VectorSpaceBasis:
    """Span of all products u v with u in x and v in y."""
    ech = _Echelon(x.field, n * n)
    if x.dim == 0 or y.dim == 0:
        return ech.freeze()
    xs = x.rows.reshape(x.dim, n, n)
    xcols = np.any(xs.num != 0, axis=1)  # (dim_x, n) columns used
    for v in _as_matrices(y, n):
        rows = _supports(v)[0]
        live = np.flatnonzero(np.any(xcols & rows, axis=1))
        if live.size == 0:
            continue
        prods = (xs[live] @ v).reshape(live.size, n * n)
        for r in ech.reduce_rows(prods):
            ech.insert(r)
    return ech.freeze()


def nilpotency_index(sub: VectorSpaceBasis, n: Optional[int] = None) -> Optional[int]:
    """Least k with sub^k = 0, or None if the powers never vanish."""
    if n is None:
        n = int(round(sub.ambient ** 0.5))
    if n * n != sub.ambient:
        raise ValueError("subspace does not consist of square matrices")
    power = sub
    for k in range(1, sub.dim + 2):
        if power.dim == 0:
            return k
        nxt = subspace_product(power, sub, n)
        if nxt == power:
            return None
        power = nxt
    return None


# characteristic-0 radical ---------------------------------------------------

def trace_gram(a: AlgebraBasis) -> ExactMatrix:
    """G[i, j] = trace(b_i b_j) for the basis of ``a``."""
    n = a.n
    rows = a.space.rows
    m = rows.shape[0]
    transposed = rows.reshape(m, n, n).transpose(0, 2, 1).reshape(m, n * n)
    return rows @ transposed.T


def radical_char0(a: AlgebraBasis) -> VectorSpaceBasis:
    """Jacobson radical in characteristic 0, as the kernel of the trace form."""
    if a.field.p != 0:
        raise ValueError(f"trace-form radical needs characteristic 0, got {a.field.name}")
    if a.dim == 0:
        return VectorSpaceBasis.empty(a.field, a.n * a.n)
    gram = trace_gram(a)
    coeffs = nullspace(gram)
    return VectorSpaceBasis.spanning(a.field, a.n * a.n, (c @ a.space.rows for c in coeffs))


# quotients ------------------------------------------------------------------

@dataclass
class QuotientData:
    representatives: VectorSpaceBasis  # RREF of residues modulo the ideal
    ideal: VectorSpaceBasis

    def coordinates(self, x: ExactMatrix) -> ExactMatrix:
        return self.representatives.coordinates(self.ideal.reduce(x.flat()))


def quotient_basis(a: AlgebraBasis, ideal: VectorSpaceBasis) -> QuotientData:
    ech = _Echelon(a.field, a.n * a.n)
    for v in a.space.vectors():
        ech.insert(ideal.reduce(v))
    return QuotientData(ech.freeze(), ideal)


def quotient_structure(a: AlgebraBasis, ideal: VectorSpaceBasis, check: bool = True) -> StructureConstants:
    """Structure constants of a / ideal on echelon complement representatives."""
    if check and not is_two_sided_ideal(ideal, a):
        raise ValueError("not a two-sided ideal")
    q = quotient_basis(a, ideal)
    reps = [v.reshape(a.n, a.n) for v in q.representatives.vectors()]
    m = len(reps)
    if m == 0:
        return StructureConstants(a.field, ExactMatrix.zeros(a.field, (0, 0, 0)), q.coordinates, [])
    rows = [q.coordinates(x @ y) for x in reps for y in reps]
    return StructureConstants(a.field, stack(a.field, rows).reshape(m, m, m), q.coordinates, reps)


# matrix units ---------------------------------------------------------------

@dataclass
class BlockCertificate:
    """Candidate matrix units ``units[(i, j)]`` for one block M_c."""

    label: str
    index: Tuple
    units: Dict[Tuple, ExactMatrix]
    verified: bool = False
    failure: str = ""

    @property
    def size(self) -> int:
        return len(self.index)


@dataclass
class UnitVerdict:
    verified: bool
    reason: str
    blocks: List[BlockCertificate]

    def __bool__(self) -> bool:
        return self.verified


class _Prepared:
    """Units of one block converted to algebra elements, with support masks."""

    def __init__(self, alg, block: BlockCertificate):
        self.block = block
        self.missing = [(i, j) for i in block.index for j in block.index if (i, j) not in block.units]
        self.units = {key: alg.element(u) for key, u in block.units.items()}
        self.masks = {key: alg.support(u) for key, u in self.units.items()}

    def items(self):
        return [(key, self.units[key], self.masks[key]) for key in self.units]


def _may_multiply(mx: Tuple[int, int], my: Tuple[int, int]) -> bool:
    return (mx[1] & my[0]) != 0


def _unit_failure(alg, prep: _Prepared) -> str:
    if prep.missing:
        return f"missing unit {prep.missing[0]}"
    units = prep.units
    for i in prep.block.index:
        if alg.is_zero(units[(i, i)]):
            return f"unit ({i}, {i}) is zero"
    items = prep.items()
    for (i, j), x, mx in items:
        for (k, l), y, my in items:
            if j != k:
                if _may_multiply(mx, my) and not alg.is_zero(alg.mul(x, y)):
                    return f"e{(i, j)} e{(k, l)} should vanish"
            elif not alg.is_zero(alg.mul(x, y) - units[(i, l)]):
                return f"e{(i, j)} e{(k, l)} != e{(i, l)}"
    return ""


def _annihilate(alg, pa: _Prepared, pb: _Prepared) -> bool:
    ys = pb.items()
    for _, x, mx in pa.items():
        for _, y, my in ys:
            if _may_multiply(mx, my) and not alg.is_zero(alg.mul(x, y)):
                return False
            if _may_multiply(my, mx) and not alg.is_zero(alg.mul(y, x)):
                return False
    return True


def verify_matrix_units(alg, blocks: Sequence[BlockCertificate]) -> UnitVerdict:
    """Certify that ``alg`` is the direct sum of the given full matrix blocks.

    ``alg`` is a :class:`StructureConstants` (elements are coordinate
    vectors) or a :class:`MatrixAlgebraView` (elements are matrices).
    Verified means: each block obeys e_ij e_kl = delta_jk e_il with nonzero
    diagonal units, units of different blocks annihilate each other, and the
    block dimensions add up to ``alg.dim``.
    """
    blocks = list(blocks)
    preps = []
    for b in blocks:
        prep = _Prepared(alg, b)
        for key, u in prep.units.items():
            if not alg.contains(u):
                raise ValueError(f"unit {key} of block {b.label} lies outside the algebra")
        preps.append(prep)
    reason = ""
    for prep in preps:
        b = prep.block
        b.failure = _unit_failure(alg, prep)
        b.verified = not b.failure
        if b.failure and not reason:
            reason = f"block {b.label}: {b.failure}"
    if not reason:
        for ia, pa in enumerate(preps):
            for pb in preps[ia + 1:]:
                if not _annihilate(alg, pa, pb):
                    reason = f"blocks {pa.block.label} and {pb.block.label} do not annihilate each other"
                    break
            if reason:
                break
    total = sum(b.size ** 2 for b in blocks)
    if not reason and total != alg.dim:
        reason = f"block dimensions sum to {total}, algebra has dimension {alg.dim}"
    return UnitVerdict(not reason, reason or "ok", blocks)


# radical sandwich -----------------------------------------------------------

@dataclass
class RadicalCertificate:
    candidate: VectorSpaceBasis
    is_ideal: bool
    nilpotency_index: Optional[int]
    quotient: Optional[UnitVerdict]
    certified: bool
    reason: str = ""

    @property
    def blocks(self) -> List[BlockCertificate]:
        return self.quotient.blocks if self.quotient else []

    @property
    def block_sizes(self) -> List[int]:
        return [b.size for b in self.blocks]


def certify_radical_sandwich(a: AlgebraBasis, candidate: VectorSpaceBasis,
                             quotient_blocks: Sequence[BlockCertificate]) -> RadicalCertificate:
    """Certify that ``candidate`` is the Jacobson radical of ``a``.

    A nilpotent two-sided ideal lies inside the radical, and if the quotient
    is a verified direct sum of full matrix algebras it is semisimple, so
    the radical lies inside the ideal.
    """
    try:
        ideal = is_two_sided_ideal(candidate, a)
    except ValueError as exc:
        return RadicalCertificate(candidate, False, None, None, False, str(exc))
    if not ideal:
        return RadicalCertificate(candidate, False, None, None, False, "candidate is not a two-sided ideal")
    nil = nilpotency_index(candidate, a.n)
    if nil is None:
        return RadicalCertificate(candidate, True, None, None, False, "candidate is not nilpotent")
    view = MatrixAlgebraView(a, candidate)
    try:
        verdict = verify_matrix_units(view, quotient_blocks)
    except ValueError as exc:
        return RadicalCertificate(candidate, True, nil, None, False, str(exc))
    return RadicalCertificate(candidate, True, nil, verdict, verdict.verified,
                              "certified" if verdict.verified else verdict.reason)
