"""Granulate a crossplane dataset, fit both twin models and score them.

Run with ``python demos/granulate_and_fit.py [--plot balls.png]``.
"""

import argparse

from granular_tsvm import gbtsvm, lsgbtsvm
from granular_tsvm.dataset import SynthSpec, generate_synthetic, train_test_split
from granular_tsvm.evaluation import accuracy
from granular_tsvm.granulation import GranulationConfig, granulate
from granular_tsvm.model import predict


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--plot", help="write a picture of the balls to this path")
    args = parser.parse_args()

    d = generate_synthetic(SynthSpec(400, 2, "crossplane", seed=0))
    train, test = train_test_split(d, 0.7, seed=0)

    # coarser balls at lower purity thresholds
    for T in (0.8, 0.9, 1.0):
        r = granulate(train, GranulationConfig(T, min_balls=4, seed=0))
        print(f"purity {T:.1f}: {r.p} balls ({r.p1} positive, {r.p2} negative) "
              f"for {train.n} training points")

    balls = granulate(train, GranulationConfig(0.9, min_balls=4, seed=0))
    models = {
        "GBTSVM": gbtsvm.fit(balls, gbtsvm.GBTSVMHyper(0.01, 0.01)),
        "LS-GBTSVM": lsgbtsvm.fit(balls, lsgbtsvm.LSHyper(0.01, 0.01, 0.01, 0.01)),
    }
    for name, m in models.items():
        print(f"{name:10s} test accuracy {accuracy(predict(m, test.features), test.labels):.1f}%")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        from granular_tsvm.granulation import plot_balls

        ax = plot_balls(balls, train.features, train.labels)
        ax.set_title(f"{balls.p} granular balls, purity 0.9")
        plt.savefig(args.plot, dpi=120)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
