"""Test accuracy as the number of labelled training ties grows.

    python scripts/train_size_sweep.py data/synthetic/planted.toml --definition II

Uses the random split (validation set the same size as training), three seeds per size.
"""
import argparse

import numpy as np

from tiestrength.datasets import read_manifest
from tiestrength.graph import build_tie_graph
from tiestrength.labeling import DefinitionId, label_definition
from tiestrength.learners import NeuralConfig, predict_ties
from tiestrength.metrics import evaluate
from tiestrength.splits import random_split


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("manifest")
    ap.add_argument("--definition", default="II")
    ap.add_argument("--models", nargs="+", default=["heuristic_forest", "mlp", "gcn"])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40, 80, 160])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--max-epochs", type=int, default=100)
    args = ap.parse_args(argv)

    tg = build_tie_graph(read_manifest(args.manifest).load()[0])
    labels = label_definition(tg, DefinitionId.parse(args.definition))
    neural = NeuralConfig(max_epochs=args.max_epochs)
    print("n_train".rjust(8) + "".join(m.rjust(18) for m in args.models))
    for n in args.sizes:
        row = []
        for model in args.models:
            accs = []
            for seed in args.seeds:
                split = random_split(tg, n, seed)
                pred = predict_ties(model, tg, labels, split, seed=seed, neural=neural)
                accs.append(evaluate(pred, labels.strong, tg, split.test).accuracy)
            row.append(f"{np.mean(accs):.3f} +/- {np.std(accs):.3f}".rjust(18))
        print(str(n).rjust(8) + "".join(row))


if __name__ == "__main__":
    main()
