"""Time the compiled and pure-Python kernel backends side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from steerengine import _backend, lhs


def cases(k):
    rng = np.random.default_rng(0)
    w, r = lhs._sample_raw(rng, 4096, 6)
    wc, rc = _backend.get("python").gibbs_correct_batch(w, r, -0.4)
    cum = np.array([0.3, 1.0])
    exc = np.random.default_rng(1).random((2, 256))
    n_anc = np.array([256, 256], dtype=np.int64)
    cells = np.arange(100_000, dtype=np.int64)
    bloch = np.array([0.0, 0.0, 1.0])
    return {
        "cell_uniforms 1e5x4": lambda: k.cell_uniforms(7, cells, 4),
        "sample_cells 2e4x256": lambda: k.sample_cells(7, 0, 20_000, cum, exc, n_anc, 1.0, 0.5),
        "gibbs_correct_batch 4096x6": lambda: k.gibbs_correct_batch(w, r, -0.4),
        "alice_work_batch 4096x7": lambda: k.alice_work_batch(wc, rc, -0.4, 1.15),
        "work_chain 1e4": lambda: k.work_chain(bloch, math.pi / 10_000, 10_000),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    names = sorted(_backend.BACKENDS)
    timings = {}
    for name in names:
        for label, fn in cases(_backend.get(name)).items():
            fn()
            timings[label, name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    labels = list(cases(_backend.get(names[0])))
    print(f"{'kernel':<28}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label in labels:
        row = f"{label:<28}" + "".join(f"{timings[label, n] * 1e3:>10.2f}ms" for n in names)
        if "compiled" in names:
            row += f"{timings[label, 'python'] / timings[label, 'compiled']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
