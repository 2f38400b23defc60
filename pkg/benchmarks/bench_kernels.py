"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import importlib
import random
import timeit

import numpy as np


def workloads(rng):
    gens3 = [[rng.randrange(60) for _ in range(3)] for _ in range(5)]
    gens2 = [[rng.randrange(60) for _ in range(2)] for _ in range(3)]
    thetas = np.linspace(-10.0, 10.0, 20_000)
    zs = np.random.default_rng(0).normal(size=20_000) + 1j * np.random.default_rng(1).normal(size=20_000)
    return {
        "kappa_pairing_num m=2 (x200)": lambda k: [k.kappa_pairing_num(gens2, 60, 2) for _ in range(200)],
        "kappa_pairing_num m=3": lambda k: k.kappa_pairing_num(gens3, 60, 3),
        "lobachevsky_many 2e4": lambda k: k.lobachevsky_many(thetas),
        "bloch_wigner_many 2e4": lambda k: k.bloch_wigner_many(zs),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = {}
    for name in ("volint._ckernels", "volint._pykernels"):
        try:
            backends[name.rsplit(".", 1)[1]] = importlib.import_module(name)
        except ImportError:
            print(f"{name} unavailable, skipping")
    print(f"{'workload':32s}" + "".join(f"{b:>14s}" for b in backends) + "     speedup")
    for label, fn in workloads(random.Random(0)).items():
        times = {b: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                 for b, k in backends.items()}
        row = f"{label:32s}" + "".join(f"{t * 1e3:12.2f}ms" for t in times.values())
        if len(times) == 2:
            row += f"  {times['_pykernels'] / times['_ckernels']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
