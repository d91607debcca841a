"""Time the coset kernels on the numba and numpy paths and check they agree.

    python3 benchmarks/bench_kernels.py [--digits 7] [--repeat 5]

``SSC_GAMMA_NO_NUMBA=1`` only changes the default path used by the library;
this script always times both (numba when it is importable).
"""
import argparse
import time

from ssc_gamma import kernels as K
from ssc_gamma.characters import log_table, tate_zeta, MultChar, SchwartzFn


def best_of(fn, repeat):
    fn()  # warm-up (compilation on the numba path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--digits", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"numba available: {K.HAVE_NUMBA}; library default path: {'numba' if K.USE_NUMBA else 'numpy'}")
    print(f"{'kernel':<28}{'p':>3}{'n':>10}{'numba ms':>11}{'numpy ms':>11}{'speedup':>9}{'|diff|':>10}")
    for p in (3, 5, 7):
        X = K.unit_grid(p, args.digits)
        mod = p ** args.digits
        tab = log_table(p)
        A = 2 * mod // p + 1
        cases = [
            ("phase_sum", lambda jit: K.phase_sum(X, A, mod, tab, (p - 1) // 2, p - 1, p, use_numba=jit)),
            ("count_congruent", lambda jit: K.count_congruent(X, (X * X) % mod, p, use_numba=jit)),
        ]
        for name, fn in cases:
            t_np, v_np = best_of(lambda: fn(False), args.repeat)
            if K.HAVE_NUMBA:
                t_nb, v_nb = best_of(lambda: fn(True), args.repeat)
                diff = abs(complex(v_nb) - complex(v_np))
                print(f"{name:<28}{p:>3}{len(X):>10}{t_nb * 1e3:>11.3f}{t_np * 1e3:>11.3f}"
                      f"{t_np / t_nb:>9.1f}{diff:>10.2g}")
            else:
                print(f"{name:<28}{p:>3}{len(X):>10}{'-':>11}{t_np * 1e3:>11.3f}{'-':>9}{'-':>10}")
    # end to end: a Tate zeta integral whose shells go through the kernels
    phi = SchwartzFn.box(5, (1,), (1,), 1, (1,)) + SchwartzFn.indicator(5, 5, 2)
    eta = MultChar.quadratic(5, 1, True)
    t, z = best_of(lambda: tate_zeta(phi, eta, 2, N=12), args.repeat)
    print(f"tate_zeta end to end (default path): {t * 1e3:.2f} ms, value {z.value:.12g}")


if __name__ == "__main__":
    main()
