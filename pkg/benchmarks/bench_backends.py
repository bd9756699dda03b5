"""Times the training kernel on both backends and checks they agree.

The pure Python kernels and the compiled extension are required to produce
bit-identical results, so the only thing this measures is speed: epochs per
second of online backpropagation on the canonical 156-record dataset with
the default [3, 9, 9, 1] topology.

Run:  python3 benchmarks/bench_backends.py [--epochs N] [--repeats R]
"""
import argparse
import importlib
import time
from array import array

from leocell import mlp, simulate
from leocell.dataset import fit_normalization


def load_backends():
    backends = [importlib.import_module("leocell._backend._pure")]
    try:
        backends.append(importlib.import_module("leocell._backend._fast"))
    except ImportError:
        print("note: compiled extension not built, timing pure Python only")
    return backends


def bench(module, sizes, model, xs, ys, lr, momentum, epochs, repeats):
    order = array("i", range(len(ys)))
    best = None
    final = None
    for _ in range(repeats):
        w = array("d", model.weights)
        b = array("d", model.biases)
        vw = array("d", bytes(8 * len(w)))
        vb = array("d", bytes(8 * len(b)))
        start = time.perf_counter()
        bad = module.train_epochs(sizes, w, b, vw, vb, xs, ys, order,
                                  lr, momentum, epochs)
        elapsed = time.perf_counter() - start
        if bad != -1:
            raise SystemExit(f"{module.NAME}: non-finite parameter at epoch {bad}")
        if best is None or elapsed < best:
            best = elapsed
        final = (tuple(w), tuple(b))
    return best, final


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--epochs", type=int, default=2000,
                        help="training epochs per timed run (default 2000)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed runs per backend, best is reported (default 3)")
    args = parser.parse_args()

    dataset = simulate.generate(simulate.SimulationPlan())
    model = mlp.init_network(mlp.NetworkTopology(layer_sizes=(3, 9, 9, 1)),
                             0, "rc", fit_normalization(dataset, "rc"))
    sizes = mlp._sizes_array(model.topology)
    xs, ys, _ = mlp._training_arrays(model, dataset)

    print(f"dataset: {len(dataset)} records, topology 3-9-9-1, "
          f"{args.epochs} epochs x {args.repeats} runs, learning rate 0.4")
    results = {}
    for module in load_backends():
        elapsed, final = bench(module, sizes, model, xs, ys,
                               0.4, 0.0, args.epochs, args.repeats)
        rate = args.epochs / elapsed
        results[module.NAME] = (elapsed, rate, final)
        print(f"  {module.NAME:8s}: {elapsed:8.3f} s  ({rate:10.1f} epochs/s)")

    if len(results) == 2:
        (pure_t, _, pure_final), (fast_t, _, fast_final) = \
            results["pure"], results["compiled"]
        if pure_final != fast_final:
            raise SystemExit("FAIL: backends disagree on the final parameters")
        print(f"  final weights and biases bit-identical across backends")
        print(f"  speedup: {pure_t / fast_t:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
