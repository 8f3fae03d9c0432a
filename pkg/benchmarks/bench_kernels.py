"""Compare the compiled and pure-Python mod-p elimination kernels.

    python benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]

Also times a full Betti table (genus-3 hyperelliptic curve, L = 8*Pinf,
over F_10007) with whichever backend is active.
"""

import argparse
import time

import numpy as np

from koszulcurve.exactalg import _kernels_py, kernels

P = 10007


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_matrices(sizes, repeat, density):
    rng = np.random.default_rng(0)
    backends = [("python", _kernels_py)]
    if kernels.compiled_backend is not None:
        backends.append(("compiled", kernels.compiled_backend))
    print(f"{'n':>5} {'density':>8} " + " ".join(f"{name + ' rank':>14} {name + ' rref':>14}" for name, _ in backends))
    for n in sizes:
        A = rng.integers(0, P, size=(n, n))
        A[rng.random(A.shape) > density] = 0
        row = [f"{n:>5} {density:>8.2f}"]
        ranks = set()
        for _, mod in backends:
            ranks.add(mod.rank_modp(A, P))
            row.append(f"{best_of(lambda: mod.rank_modp(A, P), repeat):>13.4f}s")
            row.append(f"{best_of(lambda: mod.rref_modp(A, P), repeat):>13.4f}s")
        assert len(ranks) == 1, "backends disagree"
        print(" ".join(row))


def bench_table(repeat):
    from koszulcurve.curves import HyperellipticCurve
    from koszulcurve.exactalg.fields import GF
    from koszulcurve.koszul import betti_table

    C = HyperellipticCurve([0, -1, 0, 0, 0, 0, 0, 1], GF(P))
    t = best_of(lambda: betti_table(C, C.divisor(0), C.divisor(8)), repeat)
    print(f"Betti table g=3, L=8*Pinf over F_{P} ({kernels.BACKEND} backend): {t:.4f}s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.compiled_backend is None:
        print("compiled kernels not built; timing the Python fallback only")
    bench_matrices(args.sizes, args.repeat, args.density)
    bench_table(args.repeat)


if __name__ == "__main__":
    main()
