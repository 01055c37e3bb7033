"""Compare the evaluation back ends on prolongation-sized programs.

    python3 benchmarks/bench_eval.py [--samples 25 1000 100000] [--repeat 5]

Builds a 3rd order lambda-prolongation of a random Lie-point field, compiles
all its components into one program and times ``Program.run`` per back end.
The numba timing excludes the one-off JIT compile (reported separately).
"""

import argparse
import random
import time

import numpy as np

from twistsym import JetContext, prolong_lambda
from twistsym._kernels import NUMBA_AVAILABLE
from twistsym.fuzz import rand_liepoint_field, rand_poly
from twistsym.numeric import Program


def build_program(seed: int) -> Program:
    rng = random.Random(seed)
    ctx = JetContext(1, 2, 3)
    X = rand_liepoint_field(ctx, rng, 2, 3)
    Y = prolong_lambda(X, rand_poly(ctx.coordinates(1), rng, 2, 3), 3)
    comps = [c for _, c in Y.components()]
    return Program(comps, ctx.coordinates(3), magnitudes=range(len(comps)))


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, nargs="+", default=[25, 1000, 100000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    prog = build_program(args.seed)
    backends = (["numba"] if NUMBA_AVAILABLE else []) + ["numpy", "python"]
    print(f"program: {len(prog)} instructions, {len(prog.outputs)} outputs, {len(prog.symbols)} inputs")
    if NUMBA_AVAILABLE:
        t = time.perf_counter()
        prog.run(np.zeros((1, len(prog.symbols))), "numba")
        print(f"numba first call (JIT compile): {time.perf_counter() - t:.2f}s")

    rng = np.random.default_rng(args.seed)
    print(f"{'samples':>8} " + " ".join(f"{b:>12}" for b in backends) + "   max |numba - numpy|")
    for n in args.samples:
        pts = rng.uniform(-2, 2, size=(n, len(prog.symbols)))
        times, results = [], {}
        for b in backends:
            if b == "python" and n > 1000:
                times.append(float("nan"))
                continue
            results[b] = prog.run(pts, b)
            times.append(best_of(lambda: prog.run(pts, b), args.repeat))
        dev = ""
        if "numba" in results:
            (va, ba), (vb, bb) = results["numba"], results["numpy"]
            ok = ~(ba | bb)
            dev = f"{np.max(np.abs(va[ok] - vb[ok]), initial=0.0):.2e}"
        print(f"{n:>8} " + " ".join((f"{t * 1e3:>10.2f}ms" if t == t else f"{'skipped':>12}") for t in times) + f"   {dev}")


if __name__ == "__main__":
    main()
