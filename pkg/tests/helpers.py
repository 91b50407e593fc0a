"""Shared strategies, cached contexts and small oracles for the test suite."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np
from hypothesis import assume
from hypothesis import strategies as st

from quasithin.corpus import builtin_corpus, cyclic, direct_product, orbital_scheme, relabel
from quasithin.linalg import FieldSpec
from quasithin.scheme import Scheme, classify, intersection_tensor
from quasithin.terwilliger import build_context, generate_T

CORPUS = builtin_corpus()
FIELDS = (0, 2, 3, 5)
SMALL = {k: s for k, s in CORPUS.items() if s.n <= 12}
QUASI_THIN = {k: s for k, s in CORPUS.items() if classify(intersection_tensor(s)).is_quasi_thin}
SMALL_QT = {k: s for k, s in QUASI_THIN.items() if s.n <= 12}
NON_THIN_QT = {k: s for k, s in QUASI_THIN.items() if not classify(intersection_tensor(s)).is_thin}
SMALL_NON_THIN = {k: s for k, s in NON_THIN_QT.items() if s.n <= 12}
CORE = ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "C2wrC2", "C6_fusion"]


@lru_cache(maxsize=None)
def tensor(name: str):
    return intersection_tensor(CORPUS[name])


@lru_cache(maxsize=None)
def context(name: str, vertex: int = 0, p: int = 0):
    return build_context(CORPUS[name], vertex, FieldSpec(p), tensor(name))


@lru_cache(maxsize=None)
def algebra(name: str, vertex: int = 0, p: int = 0):
    return generate_T(context(name, vertex, p))


fields = st.sampled_from(FIELDS).map(FieldSpec)


@st.composite
def relabeled(draw, pool):
    """A corpus scheme from ``pool`` with its vertices randomly renamed."""
    name = draw(st.sampled_from(sorted(pool)))
    s = pool[name]
    perm = draw(st.permutations(range(s.n)))
    return relabel(s, perm)


@st.composite
def orbital_schemes(draw, max_n: int = 9):
    """Orbital scheme of a random transitive permutation group."""
    n = draw(st.integers(2, max_n))
    gens = draw(st.lists(st.permutations(range(n)).map(tuple), min_size=1, max_size=3))
    try:
        return orbital_scheme(gens, name="random")
    except ValueError:
        assume(False)


@st.composite
def thin_products(draw):
    """Direct products of a quasi-thin corpus scheme with a small cyclic group."""
    base = draw(st.sampled_from(sorted(SMALL_QT)))
    m = draw(st.integers(1, 3))
    s = direct_product(SMALL_QT[base], cyclic(m))
    assume(s.n <= 24)
    return s


schemes = st.one_of(relabeled(SMALL), orbital_schemes())
quasi_thin_schemes = st.one_of(relabeled(QUASI_THIN), thin_products(),
                               orbital_schemes(7).filter(lambda s: classify(intersection_tensor(s)).is_quasi_thin))


def adjacency_numpy(s: Scheme) -> np.ndarray:
    return np.stack([(s.rel == b).astype(np.int64) for b in range(s.d + 1)])


def brute_intersection_numbers(s: Scheme) -> np.ndarray:
    """p[u][v][w] by direct count over every pair of type w (independent oracle)."""
    m = s.d + 1
    A = adjacency_numpy(s)
    out = np.zeros((m, m, m), dtype=np.int64)
    for w in range(m):
        g, h = np.nonzero(s.rel == w)
        for u in range(m):
            for v in range(m):
                counts = (A[u] @ A[v])[g, h]
                assert np.all(counts == counts[0]), "not regular"
                out[u, v, w] = counts[0]
    return out


def dickson_radical_dim(c: np.ndarray) -> int:
    """Dimension of the trace-form radical from a structure tensor c[i, j, k] (rational)."""
    dim = c.shape[0]
    if dim == 0:
        return 0
    # left multiplication by e_i sends e_j to sum_k c[i,j,k] e_k
    L = [np.array([[Fraction(c[i, j, k]) for j in range(dim)] for k in range(dim)], dtype=object)
         for i in range(dim)]
    gram = np.array([[sum(np.diag(L[i].dot(L[j]))) for j in range(dim)] for i in range(dim)], dtype=object)
    return dim - _fraction_rank(gram)


def _fraction_rank(m: np.ndarray) -> int:
    m = [[Fraction(x) for x in row] for row in m]
    rank, rows, cols = 0, len(m), len(m[0]) if m else 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rows):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


# acceptance lines, printed again in the terminal summary by conftest
ACCEPTANCE_LINES: list = []
