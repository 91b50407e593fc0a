"""Write the hand-built schemes to corpus/ in canonical format.

corpus/core holds the offline test corpus (Z1..Z6, C2wrC2, C6_fusion);
corpus/extra holds larger permutation-group examples.
"""

import argparse
from pathlib import Path

from quasithin.corpus import builtin_corpus, extra_corpus
from quasithin.scheme import serialize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--root", default=Path(__file__).resolve().parent.parent / "corpus", type=Path)
    args = ap.parse_args()
    extra = extra_corpus()
    for name, s in builtin_corpus().items():
        sub = "extra" if name in extra else "core"
        path = args.root / sub / f"{name}.scheme"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize(s, comment=name), encoding="utf-8")
        print(f"{path}  n={s.n} d={s.d}")


if __name__ == "__main__":
    main()
