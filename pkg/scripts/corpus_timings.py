"""Time the dimension check on every corpus scheme and print a table.

For each scheme: n, d, formula dimension, and wall-clock seconds for
closure plus formula at each requested characteristic.
"""

import argparse
import time
from pathlib import Path

from quasithin.linalg import FieldSpec
from quasithin.scheme import classify, intersection_tensor, load_scheme
from quasithin.terwilliger import build_context, generate_T, theorem_a_dimension

ROOT = Path(__file__).resolve().parent.parent / "corpus"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dirs", nargs="*", type=Path, default=[ROOT / "core", ROOT / "extra", ROOT / "fetched"])
    ap.add_argument("--char", nargs="+", type=int, default=[0, 2, 3, 5])
    args = ap.parse_args()
    print(f"{'scheme':32} {'n':>3} {'d':>3} {'dim':>5}  " + "  ".join(f"{'p=' + str(p):>7}" for p in args.char))
    for d in args.dirs:
        for path in sorted(d.glob("*.scheme")):
            s = load_scheme(path)
            t = intersection_tensor(s)
            if not classify(t).is_quasi_thin:
                print(f"{path.stem:32} {s.n:>3} {s.d:>3}  not quasi-thin")
                continue
            formula = theorem_a_dimension(t)
            cells = []
            for p in args.char:
                t0 = time.perf_counter()
                dim = generate_T(build_context(s, 0, FieldSpec(p), t)).dim
                el = time.perf_counter() - t0
                cells.append(f"{el:6.2f}s" + ("" if dim == formula else "!"))
            print(f"{path.stem:32} {s.n:>3} {s.d:>3} {formula:>5}  " + "  ".join(cells))


if __name__ == "__main__":
    main()
