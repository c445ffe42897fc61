"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times one full-batch training epoch (loss and gradients) on the default
grid, a forward pass over the validation grid, and a vectorized actuator
sweep. Also reports the largest disagreement between the two backends.
"""

import argparse
import timeit

import numpy as np

from hapticad import _kernels_py, haptics, kernels


def problem():
    model = haptics.ActuatorModel()
    data = haptics.generate_training_set(model)
    rng = np.random.default_rng(0)
    mlp = haptics.Mlp(
        rng.normal(0, 0.7, (2, 5)), np.zeros(5), rng.normal(0, 0.45, (5, 2)), np.full(2, 0.5)
    )
    X = mlp.normalize_inputs(data.position, data.force)
    T = np.ascontiguousarray(np.column_stack([data.stiffness / 5.0, data.offset]))
    P = np.ascontiguousarray(data.position)
    F = np.ascontiguousarray(data.force)
    params = (mlp.w1, mlp.b1, mlp.w2, mlp.b2)
    S = np.ascontiguousarray(data.stiffness)
    O = np.ascontiguousarray(data.offset)
    return X, T, P, F, params, S, O


def cases(X, T, P, F, params, S, O):
    return {
        "loss_and_grads (epoch)": lambda k: k.loss_and_grads(X, T, P, F, *params, 10.0, 4.0, 1e-4, 1.0),
        "mlp_forward": lambda k: k.mlp_forward(X, *params),
        "actuator_force": lambda k: k.actuator_force(S, O, P, 10.0, 4.0, 5.0),
    }


def max_diff(a, b):
    if isinstance(a, tuple):
        return max(max_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()

    compiled = kernels.compiled()
    if compiled is None:
        print("compiled kernels not built; only the numpy fallback is timed")
    prob = problem()
    print(f"rows: {len(prob[0])}, active backend: {kernels.BACKEND}")
    print(f"{'kernel':<24}{'numpy us':>12}{'cython us':>12}{'speedup':>10}{'max diff':>12}")
    for name, fn in cases(*prob).items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e6
        if compiled is None:
            print(f"{name:<24}{t_py:>12.1f}{'-':>12}{'-':>10}{'-':>12}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) * 1e6
        diff = max_diff(fn(compiled), fn(_kernels_py))
        print(f"{name:<24}{t_py:>12.1f}{t_cy:>12.1f}{t_py / t_cy:>9.1f}x{diff:>12.1e}")


if __name__ == "__main__":
    main()
