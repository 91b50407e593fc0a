"""Association schemes: parsing, validation and intersection numbers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .linalg import is_prime


class SchemeFormatError(ValueError):
    """Raised when a scheme document cannot be parsed."""


class InvalidSchemeError(ValueError):
    """Raised when an operation needs a valid scheme and gets something else."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("invalid scheme: " + "; ".join(str(v) for v in report.violations[:5]))


@dataclass(frozen=True, eq=False)
class Scheme:
    """A partition of X x X given by its relation-index matrix.

    ``rel[g, h] = a`` means ``(g, h)`` lies in relation ``R_a``.  Vertices are
    ``0..n-1`` and their natural order is the fixed total order used by the
    canonical bases.
    """

    rel: np.ndarray
    d: Optional[int] = None
    name: str = ""

    def __post_init__(self) -> None:
        rel = np.array(self.rel, dtype=np.int64)
        if rel.ndim != 2 or rel.shape[0] != rel.shape[1] or rel.shape[0] == 0:
            raise SchemeFormatError(f"relation matrix must be square and nonempty, got shape {rel.shape}")
        if rel.min() < 0:
            raise SchemeFormatError("negative relation index")
        top = int(rel.max())
        d = top if self.d is None else int(self.d)
        if d < top:
            raise SchemeFormatError(f"index {top} out of range [0, {d}]")
        rel.setflags(write=False)
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return int(self.rel.shape[0])

    @property
    def labels(self) -> range:
        return range(self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scheme):
            return NotImplemented
        return self.d == other.d and self.rel.shape == other.rel.shape and bool(np.array_equal(self.rel, other.rel))

    def __hash__(self):
        return hash(self.rel.tobytes())

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"Scheme{tag}(n={self.n}, d={self.d})"


# file format ----------------------------------------------------------------

def _data_lines(text: str) -> List[Tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").replace("\r", "\n").split("\n"), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append((lineno, line))
    return out


def _ints(lineno: int, line: str) -> List[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise SchemeFormatError(f"line {lineno}: expected integers, got {line!r}") from None


def parse_scheme(text: str, headerless: bool = False, name: str = "") -> Scheme:
    """Parse the canonical ``n d`` + matrix format, or a bare matrix.

    Only shape and index range are checked here; use :func:`validate` for
    the scheme axioms.
    """
    lines = _data_lines(text)
    if not lines:
        raise SchemeFormatError("empty document")
    if headerless:
        rows = [_ints(no, ln) for no, ln in lines]
        n = len(rows[0])
        d = max(max(r) for r in rows)
        body = list(zip([no for no, _ in lines], rows))
    else:
        hdr_no, hdr = lines[0]
        head = _ints(hdr_no, hdr)
        if len(head) != 2:
            raise SchemeFormatError(f"line {hdr_no}: header must be 'n d', got {hdr!r}")
        n, d = head
        if n < 1 or d < 0:
            raise SchemeFormatError(f"line {hdr_no}: need n >= 1 and d >= 0")
        body = [(no, _ints(no, ln)) for no, ln in lines[1:]]
    if d + 1 > n * n:
        raise SchemeFormatError(f"d+1 = {d + 1} exceeds n^2 = {n * n}")
    if len(body) != n:
        raise SchemeFormatError(f"expected {n} matrix rows, found {len(body)} (matrix is not square)")
    for no, row in body:
        if len(row) != n:
            raise SchemeFormatError(f"line {no}: expected {n} entries, found {len(row)} (matrix is not square)")
        for v in row:
            if v < 0 or v > d:
                raise SchemeFormatError(f"line {no}: index {v} out of range [0, {d}]")
    rel = np.array([row for _, row in body], dtype=np.int64)
    return Scheme(rel, d, name)


def serialize(s: Scheme, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend("# " + c for c in comment.splitlines())
    lines.append(f"{s.n} {s.d}")
    w = len(str(s.d))
    for row in s.rel:
        lines.append(" ".join(str(int(v)).rjust(w) for v in row))
    return "\n".join(lines) + "\n"


def load_scheme(path, headerless: bool = False) -> Scheme:
    from pathlib import Path

    p = Path(path)
    return parse_scheme(p.read_text(encoding="utf-8"), headerless=headerless, name=p.stem)


# validation -----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    detail: str = ""

    def __str__(self) -> str:
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.axiom} at {self.witness}{extra}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def axioms(self) -> set:
        return {v.axiom for v in self.violations}


def _transpose_map(rel: np.ndarray, d: int) -> Tuple[Optional[np.ndarray], Optional[Violation]]:
    t = np.full(d + 1, -1, dtype=np.int64)
    n = rel.shape[0]
    for i in range(n):
        for j in range(n):
            a, b = int(rel[i, j]), int(rel[j, i])
            if t[a] == -1:
                t[a] = b
            elif t[a] != b:
                return None, Violation("transpose not closed", (i, j),
                                       f"R_{a} transposes into both R_{t[a]} and R_{b}")
    for a in range(d + 1):
        if t[a] >= 0 and t[t[a]] != a:
            return None, Violation("transpose not closed", (a,), f"transpose of R_{a} is not an involution")
    return t, None


def validate(s: Scheme) -> ValidationReport:
    """Brute-force check of the scheme axioms; an empty report means valid."""
    rep = ValidationReport()
    rel = s.rel
    n, d = s.n, s.d
    off = [(int(i), int(j)) for i, j in zip(*np.nonzero(rel == 0)) if i != j]
    for i in range(n):
        if rel[i, i] != 0:
            rep.violations.append(Violation("R_0 not diagonal", (i, i), f"diagonal entry is {int(rel[i, i])}"))
            break
    if off:
        rep.violations.append(Violation("R_0 not diagonal", off[0], "off-diagonal entry is 0"))
    present = np.bincount(rel.ravel(), minlength=d + 1)
    for a in range(d + 1):
        if present[a] == 0:
            rep.violations.append(Violation("empty relation", (a,), f"R_{a} never occurs"))
    t, bad = _transpose_map(rel, d)
    if bad is not None:
        rep.violations.append(bad)
    viol = _regularity_violation(rel, d)
    if viol is not None:
        rep.violations.append(viol)
    return rep


def _regularity_violation(rel: np.ndarray, d: int) -> Optional[Violation]:
    # counts[g, h, u*(d+1)+v] = |{r : rel[g,r]=u, rel[r,h]=v}|
    n = rel.shape[0]
    m = d + 1
    seen: dict = {}
    code = rel[:, :, None] * m + rel[None, :, :]  # code[g, r, h] encodes (rel[g,r], rel[r,h])
    for g in range(n):
        block = code[g]  # (r, h)
        for h in range(n):
            tally = np.bincount(block[:, h], minlength=m * m)
            w = int(rel[g, h])
            prev = seen.get(w)
            if prev is None:
                seen[w] = (tally, (g, h))
            elif not np.array_equal(prev[0], tally):
                diff = int(np.flatnonzero(prev[0] != tally)[0])
                u, v = divmod(diff, m)
                return Violation("regularity", (g, h), f"p_{{{u},{v}}}^{w} is {int(tally[diff])} here but "
                                                       f"{int(prev[0][diff])} at {prev[1]}")
    return None


# intersection numbers -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IntersectionTensor:
    """``p[u, v, w]`` intersection numbers, valencies ``k`` and transpose ``t``."""

    p: np.ndarray
    k: np.ndarray
    t: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.p, self.k, self.t):
            arr.setflags(write=False)

    @property
    def d(self) -> int:
        return int(self.p.shape[0]) - 1

    @property
    def size(self) -> int:
        return int(self.p.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntersectionTensor):
            return NotImplemented
        return (np.array_equal(self.p, other.p) and np.array_equal(self.k, other.k)
                and np.array_equal(self.t, other.t))

    def product_size(self, a: int, b: int) -> int:
        """|R_a R_b|."""
        return int(np.count_nonzero(self.p[a, b]))

    def valency_two(self) -> List[int]:
        return [a for a in range(self.size) if self.k[a] == 2]

    def valency_one(self) -> List[int]:
        return [a for a in range(self.size) if self.k[a] == 1]


def intersection_tensor(s: Scheme) -> IntersectionTensor:
    """Intersection numbers read off one representative pair per relation."""
    rep = validate(s)
    if rep:
        raise InvalidSchemeError(rep)
    rel = s.rel
    m = s.d + 1
    p = np.zeros((m, m, m), dtype=np.int64)
    flat = rel.ravel()
    for w in range(m):
        g, h = divmod(int(np.flatnonzero(flat == w)[0]), s.n)
        np.add.at(p[:, :, w], (rel[g, :], rel[:, h]), 1)
    t = np.array([int(rel[divmod(int(np.flatnonzero(flat == a)[0]), s.n)[::-1]]) for a in range(m)], dtype=np.int64)
    k = np.array([p[q, t[q], 0] for q in range(m)], dtype=np.int64)
    return IntersectionTensor(p, k, t)


def identity_violations(t: IntersectionTensor) -> List[str]:
    """Check the standard intersection-number identities; returns failures."""
    p, k, tr = t.p, t.k, t.t
    m = t.size
    out = []
    for a in range(m):
        if k[a] != k[tr[a]]:
            out.append(f"k[{a}] != k[{a}']")
        if p[a].sum(axis=0).tolist() != [k[a]] * m:
            out.append(f"sum_e p[{a}][e][b] != k[{a}] for some b")
        for b in range(m):
            if k[a] * k[b] != int(np.dot(p[a, b], k)):
                out.append(f"k[{a}]k[{b}] != sum_e p[{a}][{b}][e] k[e]")
            for c in range(m):
                if p[tr[a], tr[b], tr[c]] != p[b, a, c]:
                    out.append(f"p[{a}'][{b}'][{c}'] != p[{b}][{a}][{c}]")
                lhs = k[c] * p[a, b, c]
                if not (lhs == k[a] * p[c, tr[b], a] == k[b] * p[tr[a], c, b]):
                    out.append(f"weighted symmetry fails at ({a},{b},{c})")
    return out


def complex_product(t: IntersectionTensor, a: int, b: int) -> frozenset:
    m = t.size
    if not (0 <= a < m and 0 <= b < m):
        raise IndexError(f"relation index out of range [0, {m - 1}]: ({a}, {b})")
    return frozenset(int(z) for z in np.flatnonzero(t.p[a, b]))


def count_nonzero_intersections(t: IntersectionTensor) -> int:
    return int(np.count_nonzero(t.p))


def two_element_pairs(t: IntersectionTensor) -> List[Tuple[int, int]]:
    """Pairs (a, b) whose complex product R_{a'} R_b has two elements."""
    return [(a, b) for a in range(t.size) for b in range(t.size) if t.product_size(int(t.t[a]), b) == 2]


@dataclass(frozen=True)
class SchemeClassification:
    is_thin: bool
    is_quasi_thin: bool
    valencies: Tuple[int, ...]

    def p_prime_valenced_for(self, q: int) -> bool:
        """True when no valency is divisible by the characteristic ``q``."""
        if q != 0 and not is_prime(q):
            raise ValueError(f"characteristic must be 0 or a prime, got {q}")
        return q == 0 or all(k % q for k in self.valencies)

    def histogram(self) -> dict:
        out: dict = {}
        for k in self.valencies:
            out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))


def classify(t: IntersectionTensor, char: int = 0) -> SchemeClassification:
    if char != 0 and not is_prime(char):
        raise ValueError(f"characteristic must be 0 or a prime, got {char}")
    kmax = int(t.k.max())
    return SchemeClassification(kmax == 1, kmax <= 2, tuple(int(v) for v in t.k))


def gcd_bound_holds(t: IntersectionTensor) -> bool:
    return all(t.product_size(a, b) <= math.gcd(int(t.k[a]), int(t.k[b]))
               for a in range(t.size) for b in range(t.size))


