"""Compare the compiled product kernel with the NumPy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Times one product per size (square inputs, output truncated to the input
degree, as in the time stepper) and one short manufactured solve per backend.
"""
import argparse
import timeit

import numpy as np

from legendre_spectra import _backend, _fallback, pde

try:
    from legendre_spectra import _kernels
except ImportError:
    _kernels = None

SIZES = (8, 30, 60, 120, 250)


def time_call(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def bench_products(repeat):
    rng = np.random.default_rng(0)
    print(f"{'N':>5} {'python [us]':>12} {'cython [us]':>12} {'speedup':>8} {'max diff':>10}")
    for N in SIZES:
        a = rng.standard_normal(N + 1)
        b = rng.standard_normal(N + 1)
        t_py = time_call(lambda: _fallback.legendre_product(a, b, N + 1, -1), repeat)
        if _kernels is None:
            print(f"{N:5d} {t_py * 1e6:12.1f} {'-':>12}")
            continue
        t_cy = time_call(lambda: _kernels.legendre_product(a, b, N + 1, -1), repeat)
        diff = np.max(np.abs(_fallback.legendre_product(a, b, N + 1, -1)
                             - _kernels.legendre_product(a, b, N + 1, -1)))
        print(f"{N:5d} {t_py * 1e6:12.1f} {t_cy * 1e6:12.1f} {t_py / t_cy:8.1f} {diff:10.1e}")


def bench_solve(repeat, steps=500):
    spec, _ = pde.manufactured_case(30)
    cfg = pde.SolverConfig(dt=0.01, steps=steps, N_prime=6)
    backends = [("python", _fallback.legendre_product)]
    if _kernels is not None:
        backends.append(("cython", _kernels.legendre_product))
    saved = _backend.legendre_product
    try:
        for name, fn in backends:
            _backend.legendre_product = fn
            t = min(timeit.repeat(lambda: pde.solve_ivp(spec, cfg), number=1, repeat=repeat))
            print(f"solve N=30, {steps} steps: {name:>6} {t:.3f} s")
    finally:
        _backend.legendre_product = saved


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    print(f"active backend: {_backend.BACKEND}")
    bench_products(args.repeat)
    bench_solve(max(1, args.repeat // 2))


if __name__ == "__main__":
    main()
