"""Search coset actions of small permutation groups for quasi-thin schemes with bad pairs.

Random pairs of permutations generate a group G; G acts on the cosets of
the subgroup generated by one involution.  Quasi-thin results with a
nonempty bad-pair set are printed with their generators, so they can be
added to the corpus.
"""

import argparse
import random

from quasithin.corpus import coset_scheme, group_closure
from quasithin.scheme import classify, intersection_tensor
from quasithin.terwilliger import bad_pair_analysis, five_tuples


def involutions(elems):
    e = tuple(range(len(elems[0])))
    return [g for g in elems if g != e and tuple(g[g[i]] for i in range(len(g))) == e]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=6, help="points moved by the generators")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--max-n", type=int, default=30, help="largest scheme order to keep")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rnd = random.Random(args.seed)
    seen = set()
    for _ in range(args.trials):
        gens = [tuple(rnd.sample(range(args.degree), args.degree)) for _ in range(2)]
        elems = group_closure(gens)
        for h in involutions(elems)[:3]:
            n = len(elems) // 2
            if n > args.max_n or (len(elems), n) in seen:
                continue
            s = coset_scheme(gens, [h])
            t = intersection_tensor(s)
            if not classify(t).is_quasi_thin:
                continue
            r = bad_pair_analysis(t)
            if r.pairs:
                seen.add((len(elems), n))
                print(f"|G|={len(elems)} n={s.n} d={s.d} bad pairs={r.pairs} "
                      f"restricted={r.restricted_pairs} witness={five_tuples(t)[0]}")
                print(f"  generators={gens} involution={h}")


if __name__ == "__main__":
    main()
