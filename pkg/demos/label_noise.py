"""Compare GBTSVM, LS-GBTSVM and the point-wise TSVM as training labels get noisier.

Each cell is a seeded 70:30 split with noise on the training labels only,
5-fold grid search and a refit, as in the benchmark command.
"""

from granular_tsvm.benchmark import BenchmarkConfig, run_benchmark
from granular_tsvm.dataset import SynthSpec, generate_synthetic
from granular_tsvm.evaluation import GridSpec, ModelFamily

NOISE = (0.0, 0.05, 0.1, 0.2)


def main():
    datasets = {
        "margin": generate_synthetic(SynthSpec(300, 2, "linear-margin", separation=1.0, seed=0)),
        "crossplane": generate_synthetic(SynthSpec(300, 2, "crossplane", seed=0)),
    }
    families = [ModelFamily("gbtsvm", purity=0.85), ModelFamily("lsgbtsvm", purity=0.85),
                ModelFamily("tsvm")]
    cfg = BenchmarkConfig(noise_levels=NOISE, grid=GridSpec((1e-3, 1e-1, 10.0)), folds=5)
    rows = run_benchmark(list(datasets.items()), families, cfg)

    print(f"{'dataset':12s}{'noise':>7s}" + "".join(f"{f.name:>11s}" for f in families))
    for name in datasets:
        for noise in NOISE:
            acc = {r["model"]: r["accuracy"] for r in rows
                   if r["dataset"] == name and r["noise"] == noise}
            cells = "".join(f"{acc[f.name]:11.1f}" if acc[f.name] is not None else f"{'-':>11s}"
                            for f in families)
            print(f"{name:12s}{noise:7.2f}{cells}")


if __name__ == "__main__":
    main()
