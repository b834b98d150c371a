"""Run an experiment grid and print mean test accuracy per definition.

    python scripts/run_grid.py configs/full_grid.toml --jobs 4

Per-cell JSON, ``results.csv``, ``aggregate.csv`` and ``failures.json`` go
to the config's ``output_dir``.
"""
import argparse
from collections import defaultdict

import numpy as np

from tiestrength.config import load_config
from tiestrength.runner import run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    cfg = load_config(args.config, jobs=args.jobs)
    records, ok = run_experiment(cfg)
    acc = defaultdict(list)
    for r in records:
        if r["status"] == "ok":
            acc[(r["dataset"], r["definition"])].append(r["result"]["accuracy"])
    datasets = sorted({d for d, _ in acc})
    defs = [d.value for d in cfg.definitions]
    print("dataset".ljust(16) + "".join(d.rjust(8) for d in defs))
    for ds in datasets:
        cells = [f"{np.mean(acc[(ds, d)]):8.3f}" if acc.get((ds, d)) else "       -" for d in defs]
        print(ds.ljust(16) + "".join(cells))
    failed = sum(r["status"] != "ok" for r in records)
    print(f"{len(records)} cells, {failed} failed, output in {cfg.output_dir.resolve()}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
