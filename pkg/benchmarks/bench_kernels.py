"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json]
"""
import argparse
import json
import random
import timeit

from cleanring import kernels


def workloads(rng: random.Random):
    table3 = kernels.get_backend("python").matmul_table(3, 2)
    table23 = kernels.get_backend("python").matmul_table(2, 3)
    rows = [[rng.randrange(101) for _ in range(24)] for _ in range(24)]
    lhs = (b"\x00\x01\x00", b"\x00\x00\x02\x00\x00")
    rhs = (b"\x00", b"\x00\x00")
    words = [bytes(rng.randrange(3) for _ in range(rng.randint(5, 30))) for _ in range(2000)]
    one3 = sum(2 ** (4 * i) for i in range(3))

    def nf_batch(mod):
        for w in words:
            mod.monomial_nf(w, lhs, rhs, (0, 1))

    return {
        "matmul_table M3(F2)": lambda mod: mod.matmul_table(3, 2),
        "matmul_table M2(F3)": lambda mod: mod.matmul_table(2, 3),
        "inner inverses, all of M2(F3)": lambda mod: [mod.inner_inverses(table23, 81, a) for a in range(81)],
        "units M3(F2)": lambda mod: mod.units(table3, 512, one3),
        "idempotents M3(F2)": lambda mod: mod.idempotents(table3, 512),
        "rref 24x24 mod 101": lambda mod: mod.rref_modp(rows, 101),
        "monomial normal forms x2000": nf_batch,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    results = {}
    for name, fn in workloads(random.Random(0)).items():
        row = {}
        for b in backends:
            mod = kernels.get_backend(b)
            row[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        results[name] = row
    if args.json:
        print(json.dumps(results, indent=2, sort_keys=True))
        return 0
    print(f"{'workload':<32}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, row in results.items():
        line = f"{name:<32}" + "".join(f"{row[b] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in row:
            line += f"{row['python'] / row['cython']:>11.1f}x"
        print(line)
    if "cython" not in backends:
        print("compiled extension not built; only the python backend was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
