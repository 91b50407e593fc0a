"""Small hand-built schemes: group schemes, fusions, wreath products, orbitals."""

from __future__ import annotations

from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .scheme import Scheme

Perm = Tuple[int, ...]


def cyclic(n: int) -> Scheme:
    """Thin scheme of Z_n: rel[i][j] = (j - i) mod n."""
    i, j = np.indices((n, n))
    return Scheme((j - i) % n, name=f"Z{n}")


def c6_fusion() -> Scheme:
    """Z_6 with each difference fused with its negative.

    Relations: 0 (diff 0), 1 (diff 3), 2 (diff +-1), 3 (diff +-2).
    """
    fuse = {0: 0, 3: 1, 1: 2, 5: 2, 2: 3, 4: 3}
    i, j = np.indices((6, 6))
    return Scheme(np.vectorize(fuse.get)((j - i) % 6), name="C6_fusion")


def wreath_c2_c2() -> Scheme:
    """Two blocks {0,1}, {2,3}: identity, same block, other block."""
    rel = [[0 if i == j else (1 if i // 2 == j // 2 else 2) for j in range(4)] for i in range(4)]
    return Scheme(rel, name="C2wrC2")


def dihedral_fusion(n: int) -> Scheme:
    """Z_n with x ~ -x fused (the distance scheme of an n-cycle)."""
    i, j = np.indices((n, n))
    diff = (j - i) % n
    return Scheme(np.minimum(diff, n - diff), name=f"cycle{n}")


def direct_product(a: Scheme, b: Scheme, name: str = "") -> Scheme:
    """Relation (r, s) on pairs, indexed r * (d_b + 1) + s."""
    ra, rb = a.rel, b.rel
    rel = (ra[:, None, :, None] * (b.d + 1) + rb[None, :, None, :]).reshape(a.n * b.n, a.n * b.n)
    return Scheme(rel, name=name or f"{a.name}x{b.name}")


# permutation groups ---------------------------------------------------------

def compose(p: Perm, q: Perm) -> Perm:
    """First p, then q (right action: x^(pq) = (x^p)^q)."""
    return tuple(q[p[i]] for i in range(len(p)))


def group_closure(gens: Sequence[Perm]) -> List[Perm]:
    """All elements of the group generated by ``gens``, in BFS order."""
    if not gens:
        raise ValueError("need at least one generator")
    e = tuple(range(len(gens[0])))
    seen = {e: None}
    order = [e]
    i = 0
    while i < len(order):
        g = order[i]
        i += 1
        for s in gens:
            h = compose(g, s)
            if h not in seen:
                seen[h] = None
                order.append(h)
    return order


def orbital_scheme(gens: Sequence[Perm], name: str = "") -> Scheme:
    """Orbitals of a transitive permutation group as a scheme.

    Relation 0 is the diagonal; the others are numbered by first appearance
    along row 0.
    """
    n = len(gens[0])
    parent = list(range(n * n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for a, b in product(range(n), repeat=2):
            ra, rb = find(a * n + b), find(g[a] * n + g[b])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = [find(x) for x in range(n * n)]
    label: Dict[int, int] = {roots[0]: 0}
    for b in range(n):
        r = roots[b]
        if r not in label:
            label[r] = len(label)
    if len(label) != len(set(roots)) or any(roots[i * n + i] != roots[0] for i in range(n)):
        raise ValueError("group is not transitive")
    rel = np.array([label[r] for r in roots], dtype=np.int64).reshape(n, n)
    return Scheme(rel, name=name)


def coset_action(group_gens: Sequence[Perm], subgroup_gens: Sequence[Perm]) -> List[Perm]:
    """Generators of G acting on the right cosets of H by right multiplication."""
    elems = group_closure(group_gens)
    h = group_closure(subgroup_gens) if subgroup_gens else [elems[0]]
    index: Dict[Perm, int] = {}
    cosets: List[frozenset] = []
    for g in elems:
        if g in index:
            continue
        c = frozenset(compose(x, g) for x in h)
        for y in c:
            index[y] = len(cosets)
        cosets.append(c)
    rep = [min(c) for c in cosets]
    return [tuple(index[compose(r, s)] for r in rep) for s in group_gens]


def coset_scheme(group_gens: Sequence[Perm], subgroup_gens: Sequence[Perm], name: str = "") -> Scheme:
    return orbital_scheme(coset_action(group_gens, subgroup_gens), name=name)


def cycle_perm(n: int, *cycles: Iterable[int]) -> Perm:
    p = list(range(n))
    for cyc in cycles:
        cyc = list(cyc)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            p[a] = b
    return tuple(p)


def relabel(s: Scheme, perm: Sequence[int]) -> Scheme:
    """Same scheme with vertex v renamed perm[v]."""
    inv = np.argsort(np.asarray(perm))
    return Scheme(s.rel[np.ix_(inv, inv)], s.d, s.name)


def builtin_corpus() -> Dict[str, Scheme]:
    """The hand-built corpus shipped with the package, keyed by file stem."""
    out: Dict[str, Scheme] = {}
    for n in range(1, 7):
        s = cyclic(n)
        out[s.name] = s
    out["C2wrC2"] = wreath_c2_c2()
    out["C6_fusion"] = c6_fusion()
    out.update(extra_corpus())
    return out


def extra_corpus() -> Dict[str, Scheme]:
    """Further quasi-thin examples built from permutation groups."""
    out: Dict[str, Scheme] = {}
    for n in (5, 8):
        s = dihedral_fusion(n)
        out[s.name] = s
    # S_4 on cosets of a transposition (n = 12) and of a double transposition
    s4 = [cycle_perm(4, (0, 1, 2, 3)), cycle_perm(4, (0, 1))]
    out["S4_by_transposition"] = coset_scheme(s4, [cycle_perm(4, (0, 1))], name="S4_by_transposition")
    out["S4_by_double_transposition"] = coset_scheme(s4, [cycle_perm(4, (0, 1), (2, 3))],
                                                    name="S4_by_double_transposition")
    # A_4 on cosets of a double transposition (n = 6)
    a4 = [cycle_perm(4, (0, 1, 2)), cycle_perm(4, (1, 2, 3))]
    out["A4_by_double_transposition"] = coset_scheme(a4, [cycle_perm(4, (0, 1), (2, 3))],
                                                    name="A4_by_double_transposition")
    out.update(bad_pair_corpus())
    return out


def bad_pair_corpus() -> Dict[str, Scheme]:
    """Quasi-thin schemes whose bad-pair set is nonempty (not triply regular)."""
    out: Dict[str, Scheme] = {}
    # Frobenius group C2^3 : C7 of order 56 on the cosets of an involution (n = 28)
    f56 = [(0, 6, 1, 7, 5, 3, 4, 2), (3, 2, 1, 0, 7, 6, 5, 4)]
    out["F56_by_involution"] = coset_scheme(f56, [f56[1]], name="F56_by_involution")
    # A_5 on the cosets of an involution (n = 30)
    a5 = [(1, 5, 4, 3, 0, 2), (5, 3, 1, 2, 0, 4)]
    out["A5_by_involution"] = coset_scheme(a5, [(1, 0, 3, 2, 4, 5)], name="A5_by_involution")
    return out
