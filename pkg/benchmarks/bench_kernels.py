"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both implementations run on identical inputs and their results are
compared before any timing is reported.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from ncpower._kernels import NC_ZERO_PAD, _pykernels
from ncpower.milp.oracle import _flatten
from ncpower.netmodel import build_regular, edfa_count, usnet
from ncpower.power import TABLE4
from ncpower.traffic import generate_matrix

try:
    from ncpower._kernels import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def hop_case(n_copies: int):
    t = usnet()
    indptr, indices = t.csr()
    return lambda mod: [mod.hop_matrix(t.n, indptr, indices) for _ in range(n_copies)]


def enum_case(kind: str, n: int):
    t = build_regular(kind, n)
    dm = generate_matrix(t, 22, 0)
    args, n_links, n_tri = _flatten(t, dm, 10**7).kernel_args
    p = TABLE4
    edfa = np.array([edfa_count(t.length(a, b), p.S) for a, b in t.directed_links()], dtype=float)
    full = (*args, edfa, n_links, n_tri, NC_ZERO_PAD, p.Pp, p.Px, p.Pt, p.Pe, p.B, float(p.W),
            (p.Po + p.Pmd) * t.n)
    return lambda mod: mod.enumerate_best(*full)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return 1

    cases = [
        ("hop_matrix usnet x200", hop_case(200)),
        ("enumerate_best ring5", enum_case("ring", 5)),
        ("enumerate_best ring6", enum_case("ring", 6)),
    ]
    print(f"{'case':<26}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, run in cases:
        ref, fast = run(_pykernels), run(_ckernels)
        if name.startswith("hop"):
            assert all(np.array_equal(a, np.asarray(b)) for a, b in zip(ref, fast))
        else:
            assert abs(ref[0] - fast[0]) <= 1e-9 * abs(ref[0])
            assert list(ref[1]) == list(fast[1])
        tp = best_of(lambda: run(_pykernels), args.repeat)
        tc = best_of(lambda: run(_ckernels), args.repeat)
        print(f"{name:<26}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
