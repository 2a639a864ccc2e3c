"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--draws N] [--repeat R]

Prints ns per draw for each kernel and generator, plus one default replicate
(10**5 symbols, alphabet 512) end to end under each backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

from geomrand import _fallback
from geomrand.sources import GeneratorKind, reduction

try:
    from geomrand import _kernels
except ImportError:
    _kernels = None

KINDS = {GeneratorKind.GOLD64: (0, 64), GeneratorKind.WEAK_LCG16: (1, 16),
         GeneratorKind.FULL_LCG64: (2, 64)}

REPLICATE = (
    "from geomrand.harness import ExperimentConfig, run_replicate;"
    "import timeit;"
    "c = ExperimentConfig(arclength=False);"
    "print(min(timeit.repeat(lambda: run_replicate(c, 0), number=20, repeat=3)) / 20)"
)


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    n = args.draws
    backends = [("python", _fallback)] + ([("compiled", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled extension not built; timing the fallback only\n")

    print(f"{'kernel':<18}{'generator':<13}" + "".join(f"{b:>12}" for b, _ in backends)
          + ("     speedup" if len(backends) == 2 else ""))
    for kind, (code, bits) in KINDS.items():
        bucket, last = reduction(bits, 512)
        cases = {
            "raw": lambda k: k.fill_raw(code, 1, n),
            "symbols": lambda k: k.fill_symbols(code, 1, n, bucket, last),
            "target_positions": lambda k: k.target_positions(code, 1, n, bucket, last, 0),
            "gamma(k=0.7)": lambda k: k.fill_gamma(code, 1, 0.7, n // 4),
        }
        for name, call in cases.items():
            draws = n // 4 if name.startswith("gamma") else n
            ns = [bench(lambda k=k: call(k), args.repeat) / draws * 1e9 for _, k in backends]
            line = f"{name:<18}{kind.value:<13}" + "".join(f"{v:>10.2f}ns" for v in ns)
            if len(ns) == 2:
                line += f"{ns[0] / ns[1]:>11.1f}x"
            print(line)

    print("\none default replicate (10**5 symbols, fit, distance):")
    for name, _ in backends:
        env = dict(os.environ, GEOMRAND_BACKEND=name)
        out = subprocess.run([sys.executable, "-c", REPLICATE], env=env,
                             capture_output=True, text=True, check=True).stdout
        print(f"  {name:<9}{float(out) * 1e3:8.3f} ms")


if __name__ == "__main__":
    main()
