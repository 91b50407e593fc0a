"""Exact dense linear algebra over GF(p) and the rationals.

Every array is stored as an integer numpy array ``num`` together with a
positive integer ``den``.  Over GF(p) the entries of ``num`` are canonical
residues in ``[0, p)`` and ``den`` is always 1.  Over the rationals the value
of an entry is ``num / den`` and the pair is kept reduced (the gcd of ``den``
and all numerators is 1), so equal arrays have equal representations.

``num`` is ``int64`` whenever every intermediate provably fits in 63 bits;
otherwise it silently becomes an ``object`` array of Python ints, so results
are always exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, List, Sequence

import numpy as np

_SAFE = 2**62
_FLOAT_EXACT = 2**53


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(q: int) -> bool:
    """Miller-Rabin with fixed bases; deterministic below 3.3e24."""
    if q < 2:
        return False
    for b in _MR_BASES:
        if q % b == 0:
            return q == b
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(s - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(p) (``characteristic = p``) or Q (``characteristic = 0``)."""

    characteristic: int

    def __post_init__(self) -> None:
        c = self.characteristic
        if not isinstance(c, (int, np.integer)) or c < 0 or (c != 0 and not is_prime(int(c))):
            raise ValueError(f"characteristic must be 0 or a prime, got {c!r}")
        object.__setattr__(self, "characteristic", int(c))

    @property
    def p(self) -> int:
        return self.characteristic

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"GF({self.p})"

    def __repr__(self) -> str:
        return f"FieldSpec({self.name})"

    def bar(self, a: int):
        """Image of an integer under the canonical map Z -> field."""
        return Fraction(a) if self.p == 0 else int(a) % self.p

    def coerce(self, x):
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x):
        x = self.coerce(x)
        if x == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.name}")
        return 1 / x if self.p == 0 else pow(x, -1, self.p)

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return int(np.max(np.abs(a)))


def _fit(a: np.ndarray) -> np.ndarray:
    """Demote an object array to int64 when every entry is small."""
    if a.dtype == object:
        if _maxabs(a) < _SAFE:
            return a.astype(np.int64)
        return a
    return a


def _widen(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _gcd_all(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return reduce(math.gcd, (int(v) for v in a.flat), 0)
    return int(np.gcd.reduce(a.ravel()))


def _binary(a: np.ndarray, b: np.ndarray, bound: int, op):
    if a.dtype != object and b.dtype != object and bound < _SAFE:
        return op(a, b)
    return op(_widen(a), _widen(b))


class ExactMatrix:
    """An exact n-dimensional array over a :class:`FieldSpec`.

    Despite the name this covers vectors, matrices and the 3-index tensors of
    structure constants.  Instances are treated as immutable.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, field: FieldSpec, num, den: int = 1, _raw: bool = False):
        self.field = field
        if _raw:
            self.num = num
            self.den = den
            return
        num = np.asarray(num)
        if num.dtype != object and not np.issubdtype(num.dtype, np.integer):
            raise TypeError(f"integer numerators required, got {num.dtype}")
        if num.dtype != object:
            num = num.astype(np.int64, copy=True)
        else:
            num = np.array(num, dtype=object, copy=True)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = _normalize(field, num, den)

    # construction -------------------------------------------------------
    @classmethod
    def from_ints(cls, field: FieldSpec, values) -> "ExactMatrix":
        return cls(field, np.array(values, dtype=object) if _needs_object(values) else np.asarray(values, dtype=np.int64))

    @classmethod
    def from_scalars(cls, field: FieldSpec, values, shape=None) -> "ExactMatrix":
        """Build from a nested sequence of ints/Fractions (field elements)."""
        flat = np.array(values, dtype=object)
        if shape is None:
            shape = flat.shape
        flat = flat.ravel()
        if field.p == 0:
            fr = [Fraction(v) for v in flat]
            den = reduce(lambda x, y: x * y // math.gcd(x, y), (f.denominator for f in fr), 1)
            num = np.array([f.numerator * (den // f.denominator) for f in fr], dtype=object)
            return cls(field, _fit(num.reshape(shape)) if num.size else np.zeros(shape, np.int64), den)
        num = np.array([field.coerce(v) for v in flat], dtype=np.int64)
        return cls(field, num.reshape(shape))

    @classmethod
    def zeros(cls, field: FieldSpec, shape) -> "ExactMatrix":
        return cls(field, np.zeros(shape, dtype=np.int64), 1, _raw=True)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "ExactMatrix":
        return cls(field, np.eye(n, dtype=np.int64), 1, _raw=True)

    @classmethod
    def ones(cls, field: FieldSpec, shape) -> "ExactMatrix":
        return cls(field, np.ones(shape, dtype=np.int64) % (field.p or 2**63 - 1), 1, _raw=True)

    @classmethod
    def unit(cls, field: FieldSpec, n: int, u: int, v: int) -> "ExactMatrix":
        m = np.zeros((n, n), dtype=np.int64)
        m[u, v] = 1
        return cls(field, m, 1, _raw=True)

    # basic properties ---------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.num.shape

    @property
    def ndim(self) -> int:
        return self.num.ndim

    @property
    def size(self) -> int:
        return self.num.size

    def __len__(self) -> int:
        return self.shape[0]

    def _same(self, other: "ExactMatrix") -> None:
        if not isinstance(other, ExactMatrix):
            raise TypeError(f"expected ExactMatrix, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field.name} vs {other.field.name}")

    def _new(self, num, den=1) -> "ExactMatrix":
        num, den = _normalize(self.field, num, den)
        return ExactMatrix(self.field, num, den, _raw=True)

    # element access -----------------------------------------------------
    def __getitem__(self, key) -> "ExactMatrix":
        sub = self.num[key]
        if not isinstance(sub, np.ndarray):
            sub = np.array(sub, dtype=self.num.dtype)
        return self._new(sub.copy(), self.den)

    def item(self, *index):
        """Entry as a field scalar (Fraction over Q, int over GF(p))."""
        v = int(self.num[index] if index else self.num.item())
        if self.field.p == 0:
            return Fraction(v, self.den)
        return v

    def tolist(self):
        if self.field.p == 0:
            return np.vectorize(lambda v: Fraction(int(v), self.den), otypes=[object])(self.num).tolist()
        return self.num.astype(np.int64).tolist()

    def nonzero_mask(self) -> np.ndarray:
        return self.num != 0

    def is_zero(self) -> bool:
        return not np.any(self.num != 0)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.field.p:
            return self._new((self.num + other.num) % self.field.p)
        a, b = self.num, other.num
        if self.den == other.den:
            bound = _maxabs(a) + _maxabs(b)
            return self._new(_binary(a, b, bound, np.add), self.den)
        bound = _maxabs(a) * other.den + _maxabs(b) * self.den
        num = _binary(a, b, bound, lambda x, y: x * other.den + y * self.den)
        return self._new(num, self.den * other.den)

    def __neg__(self) -> "ExactMatrix":
        if self.field.p:
            return self._new((-self.num) % self.field.p)
        return ExactMatrix(self.field, -self.num, self.den, _raw=True)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.field.p and isinstance(other, ExactMatrix) and other.field == self.field:
            if self.shape != other.shape:
                raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
            return self._new((self.num - other.num) % self.field.p)
        return self + (-other)

    def scale(self, s) -> "ExactMatrix":
        s = self.field.coerce(s)
        if self.field.p:
            return self._new((self.num * s) % self.field.p)
        bound = _maxabs(self.num) * abs(s.numerator)
        num = self.num * s.numerator if bound < _SAFE and self.num.dtype != object else _widen(self.num) * s.numerator
        return self._new(num, self.den * s.denominator)

    def __mul__(self, s) -> "ExactMatrix":
        if isinstance(s, ExactMatrix):
            raise TypeError("use @ for matrix products")
        return self.scale(s)

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same(other)
        if self.ndim == 0 or other.ndim == 0:
            raise ValueError("matmul requires at least 1-d operands")
        inner = self.shape[-1]
        if inner != (other.shape[0] if other.ndim == 1 else other.shape[-2]):
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return self._product(other, lambda a, b: a @ b, inner)

    def tensordot(self, other: "ExactMatrix", axes) -> "ExactMatrix":
        self._same(other)
        a_axes, b_axes = axes
        a_axes = [a_axes] if isinstance(a_axes, int) else list(a_axes)
        inner = int(np.prod([self.shape[i] for i in a_axes])) if a_axes else 1
        return self._product(other, lambda a, b: np.tensordot(a, b, axes=axes), inner)

    def _product(self, other: "ExactMatrix", op, inner: int) -> "ExactMatrix":
        a, b = self.num, other.num
        bound = _maxabs(a) * _maxabs(b) * max(inner, 1)
        if bound < _FLOAT_EXACT and a.dtype != object and b.dtype != object:
            # every partial sum is an integer below 2^53, so BLAS is exact
            num = np.rint(op(a.astype(np.float64), b.astype(np.float64))).astype(np.int64)
        else:
            num = _binary(a, b, bound, op)
        if self.field.p:
            return self._new(num % self.field.p)
        return self._new(num, self.den * other.den)

    # shape manipulation -------------------------------------------------
    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.num.T.copy(), self.den, _raw=True)

    def transpose(self, *axes) -> "ExactMatrix":
        return ExactMatrix(self.field, np.transpose(self.num, axes or None).copy(), self.den, _raw=True)

    def reshape(self, *shape) -> "ExactMatrix":
        return ExactMatrix(self.field, self.num.reshape(*shape).copy(), self.den, _raw=True)

    def flat(self) -> "ExactMatrix":
        return self.reshape(-1)

    def trace(self):
        if self.ndim != 2 or self.shape[0] != self.shape[1]:
            raise ValueError(f"trace needs a square matrix, got shape {self.shape}")
        return ExactMatrix(self.field, np.array(np.trace(self.num) if self.num.dtype != object
                                                else sum(self.num[i, i] for i in range(self.shape[0])),
                                                dtype=self.num.dtype), self.den).item()

    # comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and self.den == other.den and bool(np.all(self.num == other.num)))

    def __hash__(self):
        return hash((self.field, self.shape, self.den, tuple(int(v) for v in self.num.flat)))

    def __repr__(self) -> str:
        body = np.array2string(np.asarray(self.num, dtype=object))
        suffix = f" / {self.den}" if self.den != 1 else ""
        return f"ExactMatrix[{self.field.name}]({body}{suffix})"


def _needs_object(values) -> bool:
    a = np.asarray(values, dtype=object)
    return a.size > 0 and _maxabs(a) >= _SAFE


def _normalize(field: FieldSpec, num: np.ndarray, den: int):
    if field.p:
        if num.dtype == object:
            num = np.array([int(v) % field.p for v in num.flat], dtype=np.int64).reshape(num.shape)
        elif np.any((num < 0) | (num >= field.p)):
            num = num % field.p
        return num, 1
    if den < 0:
        num, den = -num, -den
    if den == 1:
        return _fit(num), 1
    g = math.gcd(_gcd_all(num), den)
    if g == 0:  # empty array
        return _fit(num), 1
    if g > 1:
        num = num // g
        den //= g
    if not np.any(num != 0):
        den = 1
    return _fit(num), den


def stack(field: FieldSpec, items: Sequence[ExactMatrix]) -> ExactMatrix:
    """Stack equally shaped arrays along a new leading axis."""
    items = list(items)
    if not items:
        raise ValueError("nothing to stack")
    if field.p:
        return ExactMatrix(field, np.stack([m.num for m in items]).astype(np.int64), 1, _raw=True)
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (m.den for m in items), 1)
    parts = []
    wide = any(m.num.dtype == object for m in items) or den * max(_maxabs(m.num) for m in items) >= _SAFE
    for m in items:
        f = den // m.den
        parts.append((_widen(m.num) if wide else m.num) * f)
    return ExactMatrix(field, np.stack(parts), den)


# row reduction --------------------------------------------------------------

def rref(m: ExactMatrix) -> tuple[ExactMatrix, tuple[int, ...]]:
    """Reduced row echelon form of a 2-d array and its pivot columns."""
    if m.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    basis = VectorSpaceBasis.empty(m.field, m.shape[1])
    for i in range(m.shape[0]):
        basis, _ = reduce_and_insert(basis, m[i])
    if basis.dim == 0:
        return ExactMatrix.zeros(m.field, (0, m.shape[1])), ()
    return basis.rows, basis.pivots


def nullspace(m: ExactMatrix) -> list[ExactMatrix]:
    """Basis of {x : m @ x = 0}, one vector per free column."""
    rows, pivots = rref(m)
    ncols = m.shape[1]
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = []
    for f in free:
        vals = [m.field.zero()] * ncols
        vals[f] = m.field.one()
        for r, pc in enumerate(pivots):
            vals[pc] = -rows.item(r, f)
        out.append(ExactMatrix.from_scalars(m.field, vals))
    return out


def rank(m: ExactMatrix) -> int:
    return len(rref(m)[1])


class VectorSpaceBasis:
    """A subspace of F^N held in reduced row echelon form.

    The RREF of a subspace is unique, so two bases compare equal exactly when
    they span the same space; this is what makes closure results independent
    of insertion order.
    """

    __slots__ = ("field", "ambient", "rows", "pivots", "_pivot_index")

    def __init__(self, field: FieldSpec, ambient: int, rows: ExactMatrix | None, pivots: tuple[int, ...]):
        self.field = field
        self.ambient = ambient
        self.rows = rows if rows is not None else ExactMatrix.zeros(field, (0, ambient))
        self.pivots = tuple(pivots)
        self._pivot_index = {p: i for i, p in enumerate(self.pivots)}

    @classmethod
    def empty(cls, field: FieldSpec, ambient: int) -> "VectorSpaceBasis":
        return cls(field, ambient, None, ())

    @classmethod
    def spanning(cls, field: FieldSpec, ambient: int, vectors: Iterable[ExactMatrix]) -> "VectorSpaceBasis":
        b = _Echelon(field, ambient)
        chunk: list = []

        def flush() -> None:
            if chunk:
                for r in b.reduce_rows(stack(field, chunk)):
                    b.insert(r)
                chunk.clear()

        for v in vectors:
            if v.field != field:
                raise ValueError(f"field mismatch: {v.field.name} vs {field.name}")
            v = v.flat()
            if v.shape != (ambient,):
                raise ValueError(f"dimension mismatch: {v.shape} vs ({ambient},)")
            chunk.append(v)
            if len(chunk) == 64:
                flush()
        flush()
        return b.freeze()

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __len__(self) -> int:
        return self.dim

    def vectors(self) -> list[ExactMatrix]:
        return [self.rows[i] for i in range(self.dim)]

    def reduce(self, v: ExactMatrix) -> ExactMatrix:
        """Remainder of ``v`` after elimination against the basis."""
        return _reduce(self.rows, self.pivots, self._check(v))

    def contains(self, v: ExactMatrix) -> bool:
        return self.reduce(v).is_zero()

    def reduce_many(self, m: ExactMatrix) -> ExactMatrix:
        """Remainders of all rows of a 2-d array, computed in one product."""
        if m.ndim != 2 or m.shape[1] != self.ambient:
            raise ValueError(f"expected rows of length {self.ambient}, got shape {m.shape}")
        if not self.dim or m.shape[0] == 0:
            return m
        piv = np.asarray(self.pivots)
        hit = np.flatnonzero(np.any(m.num[:, piv] != 0, axis=0))
        if hit.size == 0:
            return m
        return m - m[:, piv[hit]] @ self.rows[hit]

    def contains_all(self, m: ExactMatrix) -> bool:
        return self.reduce_many(m).is_zero()

    def coordinates(self, v: ExactMatrix) -> ExactMatrix:
        """Coefficients of ``v`` in the RREF rows; raises if ``v`` is outside."""
        v = self._check(v)
        if not _reduce(self.rows, self.pivots, v).is_zero():
            raise ValueError("vector is not in the span")
        if self.dim == 0:
            return ExactMatrix.zeros(self.field, (0,))
        return v[list(self.pivots)]

    def contains_space(self, other: "VectorSpaceBasis") -> bool:
        return other.dim == 0 or self.contains_all(other.rows)

    def _check(self, v: ExactMatrix) -> ExactMatrix:
        if v.field != self.field:
            raise ValueError(f"field mismatch: {v.field.name} vs {self.field.name}")
        v = v.flat() if v.ndim != 1 else v
        if v.shape[0] != self.ambient:
            raise ValueError(f"dimension mismatch: vector of length {v.shape[0]}, ambient {self.ambient}")
        return v

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorSpaceBasis):
            return NotImplemented
        return (self.field == other.field and self.ambient == other.ambient
                and self.pivots == other.pivots and self.rows == other.rows)

    def __repr__(self) -> str:
        return f"VectorSpaceBasis({self.field.name}, dim={self.dim}, ambient={self.ambient})"


def _reduce(rows: ExactMatrix, pivots: tuple[int, ...], v: ExactMatrix) -> ExactMatrix:
    if not pivots:
        return v
    piv = np.asarray(pivots)
    hit = np.nonzero(v.num[piv] != 0)[0]
    if hit.size == 0:
        return v
    coeff = v[piv[hit]]
    return v - coeff @ rows[hit]


class _Echelon:
    """Mutable RREF accumulator used internally by closures.

    Rows are kept in insertion order (each pivot column still has a single
    nonzero) and sorted by pivot on ``freeze``.  Over small prime fields the
    rows live in a growable int64 buffer updated in place.
    """

    def __init__(self, field: FieldSpec, ambient: int):
        self.field = field
        self.ambient = ambient
        self.pivots: list[int] = []
        self._buf = np.zeros((16, ambient), dtype=np.int64) if 0 < field.p < 2**31 else None
        self._rows = ExactMatrix.zeros(field, (0, ambient))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def rows(self) -> ExactMatrix:
        if self._buf is not None:
            return ExactMatrix(self.field, self._buf[:self.dim], 1, _raw=True)
        return self._rows

    def load(self, basis: VectorSpaceBasis) -> None:
        self.pivots = list(basis.pivots)
        if self._buf is not None:
            self._buf = np.zeros((max(16, 2 * basis.dim), self.ambient), dtype=np.int64)
            self._buf[:basis.dim] = basis.rows.num
        else:
            self._rows = basis.rows

    def reduce(self, v: ExactMatrix) -> ExactMatrix:
        return _reduce(self.rows, tuple(self.pivots), v)

    def reduce_rows(self, m: ExactMatrix) -> List[ExactMatrix]:
        """Reduce every row of ``m`` at once; return the nonzero remainders."""
        if self.dim:
            piv = np.asarray(self.pivots)
            hit = np.flatnonzero(np.any(m.num[:, piv] != 0, axis=0))
            if hit.size:
                m = m - m[:, piv[hit]] @ self.rows[hit]
        keep = np.flatnonzero(np.any(m.num != 0, axis=1))
        return [m[int(i)] for i in keep]

    def insert(self, v: ExactMatrix) -> ExactMatrix | None:
        """Insert ``v``; return the new normalized row, or None if dependent."""
        if v.shape != (self.ambient,):
            raise ValueError(f"dimension mismatch: {v.shape} vs ({self.ambient},)")
        r = self.reduce(v)
        nz = np.flatnonzero(r.num)
        if nz.size == 0:
            return None
        p = int(nz[0])
        r = r.scale(self.field.inv(r.item(p)))
        rows = self.rows
        if self.dim:
            nz = np.flatnonzero(rows.num[:, p])
            if nz.size:
                sub = rows[nz]
                upd = sub - sub[:, [p]] @ r.reshape(1, -1)
                if self._buf is not None:
                    self._buf[nz] = upd.num
                else:
                    self._rows = _set_rows(rows, nz, upd)
        if self._buf is not None:
            if self.dim == self._buf.shape[0]:
                self._buf = np.concatenate([self._buf, np.zeros_like(self._buf)])
            self._buf[self.dim] = r.num
        else:
            self._rows = _insert_row(self._rows, r, self.dim)
        self.pivots.append(p)
        return r

    def freeze(self) -> VectorSpaceBasis:
        order = np.argsort(self.pivots, kind="stable")
        if self._buf is not None:
            rows = ExactMatrix(self.field, self._buf[:self.dim][order].copy(), 1, _raw=True)
        else:
            rows = self._rows[order] if self.dim else self._rows
        return VectorSpaceBasis(self.field, self.ambient, rows, tuple(int(self.pivots[i]) for i in order))


def _set_rows(rows: ExactMatrix, idx: np.ndarray, upd: ExactMatrix) -> ExactMatrix:
    """Copy of ``rows`` with the rows at ``idx`` replaced by ``upd``."""
    field = rows.field
    if field.p:
        num = rows.num.copy()
        num[idx] = upd.num
        return ExactMatrix(field, num, 1, _raw=True)
    den = rows.den * upd.den // math.gcd(rows.den, upd.den)
    a, b = rows.num, upd.num
    fa, fb = den // rows.den, den // upd.den
    if a.dtype == object or b.dtype == object or _maxabs(a) * fa >= _SAFE or _maxabs(b) * fb >= _SAFE:
        a, b = _widen(a), _widen(b)
    num = a * fa
    num[idx] = b * fb
    return ExactMatrix(field, num, den)


def _insert_row(rows: ExactMatrix, r: ExactMatrix, pos: int) -> ExactMatrix:
    field = rows.field
    if field.p:
        return ExactMatrix(field, np.insert(rows.num, pos, r.num, axis=0), 1, _raw=True)
    den = rows.den * r.den // math.gcd(rows.den, r.den)
    a, b = rows.num, r.num
    fa, fb = den // rows.den, den // r.den
    wide = (a.dtype == object or b.dtype == object
            or _maxabs(a) * fa >= _SAFE or _maxabs(b) * fb >= _SAFE)
    if wide:
        a, b = _widen(a), _widen(b)
    num = np.insert(a * fa, pos, b * fb, axis=0)
    return ExactMatrix(field, num, den)


def reduce_and_insert(b: VectorSpaceBasis, m: ExactMatrix) -> tuple[VectorSpaceBasis, bool]:
    """Return the basis of span(b + {m}) and whether ``m`` was new."""
    v = b._check(m)
    e = _Echelon(b.field, b.ambient)
    e.load(b)
    added = e.insert(v) is not None
    return (e.freeze() if added else b), added


# matrix algebras ------------------------------------------------------------

class AlgebraBasis:
    """A product-closed subspace of n x n matrices, with its generators."""

    def __init__(self, space: VectorSpaceBasis, n: int, generators: Sequence[ExactMatrix] = ()):
        if space.ambient != n * n:
            raise ValueError("ambient dimension must be n*n")
        self.space = space
        self.n = n
        self.generators = tuple(generators)

    @property
    def field(self) -> FieldSpec:
        return self.space.field

    @property
    def dim(self) -> int:
        return self.space.dim

    def __len__(self) -> int:
        return self.dim

    def matrices(self) -> list[ExactMatrix]:
        return [v.reshape(self.n, self.n) for v in self.space.vectors()]

    def matrix(self, i: int) -> ExactMatrix:
        return self.space.rows[i].reshape(self.n, self.n)

    def contains(self, m: ExactMatrix) -> bool:
        return self.space.contains(m.flat())

    def coordinates(self, m: ExactMatrix) -> ExactMatrix:
        return self.space.coordinates(m.flat())

    def from_coordinates(self, c: ExactMatrix) -> ExactMatrix:
        return (c @ self.space.rows).reshape(self.n, self.n)

    def products(self, x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
        return x @ y

    def element(self, m: ExactMatrix) -> ExactMatrix:
        if not self.contains(m):
            raise ValueError("matrix is not in the algebra")
        return m

    def is_closed(self) -> bool:
        mats = self.matrices()
        return all(self.contains(a @ b) for a in mats for b in mats)

    def __repr__(self) -> str:
        return f"AlgebraBasis({self.field.name}, n={self.n}, dim={self.dim})"


def product_closure(gens: Sequence[ExactMatrix], field: FieldSpec, strategy: str = "generators") -> AlgebraBasis:
    """Smallest subalgebra of M_n(F) containing ``gens``.

    ``strategy="generators"`` multiplies each new basis element on the right
    by every generator; the span of all words in the generators is the
    smallest space closed under that, and it is already closed under all
    products.  ``strategy="pairwise"`` multiplies basis elements pairwise
    until nothing new appears; it is slower and kept as a cross-check.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("empty generator list")
    n = gens[0].shape[0]
    for g in gens:
        if g.field != field:
            raise ValueError("generator over the wrong field")
        if g.shape != (n, n):
            raise ValueError(f"generators must all be {n}x{n}, got {g.shape}")
    ech = _Echelon(field, n * n)
    queue: list[ExactMatrix] = []
    for g in gens:
        row = ech.insert(g.flat())
        if row is not None:
            queue.append(row.reshape(n, n))
    if strategy == "generators":
        gstack = stack(field, gens)  # (g, n, n)
        i = 0
        while i < len(queue):
            b = queue[i]
            i += 1
            prods = (b @ gstack).reshape(len(gens), n * n)
            for r in ech.reduce_rows(prods):
                row = ech.insert(r)
                if row is not None:
                    queue.append(row.reshape(n, n))
    elif strategy == "pairwise":
        changed = True
        while changed:
            changed = False
            mats = [v.reshape(n, n) for v in ech.freeze().vectors()]
            for a in mats:
                for b in mats:
                    if ech.insert((a @ b).flat()) is not None:
                        changed = True
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return AlgebraBasis(ech.freeze(), n, gens)
