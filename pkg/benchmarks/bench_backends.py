"""Compiled-vs-python backend benchmark for the hot kernels.

Times pairwise squared-distance assembly (the dominant cost of Gram-matrix
construction) and a full deep-kernel Gram evaluation under each backend.
Run: python benchmarks/bench_backends.py
"""

import time

import numpy as np

from nsgvd.backend import _numpy

try:
    from nsgvd.backend import _core
except ImportError:
    _core = None

from nsgvd.kernel import KernelParams, gram
from nsgvd.rng import substream


def time_call(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sqdist():
    print(f"{'pairwise_sqdist':<28}{'shape':<22}{'python':>12}{'compiled':>12}{'speedup':>10}")
    rng = substream(0, "bench")
    for n, m, k in [(100, 100, 128), (500, 500, 128), (200, 200, 2048), (1000, 1000, 512)]:
        a = rng.standard_normal((n, k))
        b = rng.standard_normal((m, k))
        t_py = time_call(lambda: _numpy.pairwise_sqdist(a, b))
        if _core is not None:
            t_c = time_call(lambda: _core.pairwise_sqdist(a, b))
            np.testing.assert_allclose(
                _core.pairwise_sqdist(a, b), _numpy.pairwise_sqdist(a, b), rtol=1e-12
            )
            print(f"{'':<28}{f'{n}x{m}x{k}':<22}{t_py:>11.4f}s{t_c:>11.4f}s{t_py / t_c:>9.2f}x")
        else:
            print(f"{'':<28}{f'{n}x{m}x{k}':<22}{t_py:>11.4f}s{'n/a':>12}{'':>10}")


def bench_gram():
    import nsgvd.backend as backend

    print(f"\n{'deep-kernel gram':<28}{'shape':<22}{'python':>12}{'compiled':>12}{'speedup':>10}")
    rng = substream(1, "bench")
    for n, k in [(200, 128), (400, 512)]:
        feats = rng.standard_normal((n, k))
        params = KernelParams.default(k, rng, hidden=(64,), output_dim=32)
        times = {}
        for name, impl in [("python", _numpy)] + ([("compiled", _core)] if _core else []):
            backend.pairwise_sqdist = impl.pairwise_sqdist
            backend.pairwise_sqdist_self = impl.pairwise_sqdist_self
            times[name] = time_call(lambda: gram(feats, None, params), repeats=3)
        if "compiled" in times:
            print(
                f"{'':<28}{f'{n}x{n}x{k}':<22}{times['python']:>11.4f}s"
                f"{times['compiled']:>11.4f}s{times['python'] / times['compiled']:>9.2f}x"
            )
        else:
            print(f"{'':<28}{f'{n}x{n}x{k}':<22}{times['python']:>11.4f}s{'n/a':>12}")


if __name__ == "__main__":
    print(f"compiled backend available: {_core is not None}\n")
    bench_sqdist()
    bench_gram()
