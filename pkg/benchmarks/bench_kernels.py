"""Time the compiled graph kernels against the pure-Python twin.

    python benchmarks/bench_kernels.py [--players 8 64] [--edges 64 4096] [--repeat 20]

Both implementations are fed identical inputs and their outputs are compared
before timing, so a speedup is never reported for diverging kernels.
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit
from array import array

from revac.graph import _kernels_py

try:
    from revac.graph import _kernels as _compiled
except ImportError:
    _compiled = None


def make_stream(n: int, m: int, seed: int):
    rng = random.Random(seed)
    src, dst, w, day = array("q"), array("q"), array("d"), array("q")
    for i in range(m):
        a = rng.randrange(n)
        b = rng.randrange(n - 1)
        b += b >= a
        src.append(a)
        dst.append(b)
        w.append(rng.choice((-2.0, -1.0, 1.0)))
        day.append(i * 4 // m)
    return src, dst, w, day


def workload(impl, n, stream):
    src, dst, w, day = stream
    pos, neg = impl.pair_sums(n, src, dst, w, day, -1)
    scores = impl.in_scores(n, pos, neg, 0)
    pairs = impl.mutual_pairs(n, pos, 2.0)
    return pos, neg, scores, pairs


def _same(a, b) -> bool:
    pa, na, sa, ma = a
    pb, nb, sb, mb = b
    return (list(pa) == list(pb) and list(na) == list(nb)
            and all(list(x) == list(y) for x, y in zip(sa, sb)) and list(ma) == list(mb))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--players", type=int, nargs="+", default=[8, 32, 128])
    ap.add_argument("--edges", type=int, nargs="+", default=[64, 1024, 16384])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'players':>7} {'edges':>6} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for n in args.players:
        for m in args.edges:
            stream = make_stream(n, m, seed=n * 7919 + m)
            if not _same(workload(_kernels_py, n, stream), workload(_compiled, n, stream)):
                print(f"MISMATCH at n={n} m={m}", file=sys.stderr)
                return 2
            py = min(timeit.repeat(lambda: workload(_kernels_py, n, stream), number=1, repeat=args.repeat))
            cy = min(timeit.repeat(lambda: workload(_compiled, n, stream), number=1, repeat=args.repeat))
            print(f"{n:>7} {m:>6} {py * 1e3:>10.3f} {cy * 1e3:>10.3f} {py / cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
