from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClassWeights:
    strong: float
    weak: float

    def per_sample(self, strong_mask) -> np.ndarray:
        return np.where(np.asarray(strong_mask, dtype=bool), self.strong, self.weak)


def quantity_reweight(train_strong) -> ClassWeights:
    """Per-class loss weight ``|train| / |train of class k|``."""
    s = np.asarray(train_strong, dtype=bool)
    total = len(s)
    n_strong = int(s.sum())
    n_weak = total - n_strong
    for name, count in (("strong", n_strong), ("weak", n_weak)):
        if count == 0:
            raise ValueError(f"class {name!r} absent from train set; weights undefined")
    return ClassWeights(strong=total / n_strong, weak=total / n_weak)
