"""Euler sampler checks: exactness on a constant field, first-order convergence on v = -x.

    python scripts/flow_convergence.py --steps 10 20 40 80 160
"""

import argparse

import numpy as np

from sketchforge.flowmatch import euler_sample, exact_velocity


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--steps", type=int, nargs="+", default=[10, 20, 40, 80, 160])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    x0, eps = rng.standard_normal((4, 8, 8)), rng.standard_normal((4, 8, 8))
    v = exact_velocity(x0, eps)
    print("constant field (exact velocity), max |x - x0|:")
    for n in (1, 7, 50):
        print(f"  steps={n:<4d} {np.abs(euler_sample(v, eps, n) - x0).max():.2e}")

    # dx/dt = -x run from t=1 to t=0 gives x(0) = e * x(1)
    print("\nlinear field v = -x, x(1) = 1, exact x(0) = e:")
    prev = None
    for n in args.steps:
        err = abs(float(euler_sample(lambda x, t, c: -x, 1.0, n)) - np.e)
        ratio = f"{prev / err:6.3f}" if prev else "     -"
        print(f"  steps={n:<5d} error={err:.3e}  ratio={ratio}")
        prev = err


if __name__ == "__main__":
    main()
