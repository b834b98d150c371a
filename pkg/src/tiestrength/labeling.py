"""Pseudo ground-truth tie strength labels under the seven definitions."""
from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .graph import TieGraph, local_thresholds


class DefinitionId(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    VII = "VII"

    @classmethod
    def parse(cls, name) -> "DefinitionId":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().upper())
        except ValueError:
            raise ValueError(
                f"unknown definition {name!r}; expected one of {[d.value for d in cls]}"
            ) from None

    @property
    def uses_global(self) -> bool:
        return self in (DefinitionId.II, DefinitionId.III)

    @property
    def uses_local(self) -> bool:
        return self in (DefinitionId.IV, DefinitionId.V, DefinitionId.VI, DefinitionId.VII)


DEFINITIONS = tuple(DefinitionId)
STC = "STC"


@dataclass(frozen=True)
class ThresholdConfig:
    """Candidate thresholds; ``None`` means derive defaults from the tie graph."""

    global_candidates: tuple[float, ...] | None = None
    local_candidates: tuple[int, ...] | None = None

    def __post_init__(self):
        for name in ("global_candidates", "local_candidates"):
            c = getattr(self, name)
            if c is None:
                continue
            if len(c) == 0:
                raise ValueError(f"{name} must be non-empty")
            if any(b <= a for a, b in zip(c, c[1:])):
                raise ValueError(f"{name} must be strictly increasing")
            if c[0] <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class LabelSet:
    """Binary labels over the ties of ``tie_graph``; ``strong[t]`` is True for Strong."""

    definition: DefinitionId | str
    strong: np.ndarray
    tie_graph: TieGraph = field(repr=False)
    theta_global: float | None = None
    theta_local: int | None = None

    def __post_init__(self):
        if len(self.strong) != self.tie_graph.n_ties:
            raise ValueError(
                f"{len(self.strong)} labels for {self.tie_graph.n_ties} ties"
            )

    @property
    def name(self) -> str:
        d = self.definition
        return d.value if isinstance(d, DefinitionId) else str(d)

    @property
    def n_strong(self) -> int:
        return int(self.strong.sum())

    @property
    def n_weak(self) -> int:
        return len(self.strong) - self.n_strong


def default_global_candidates(tg: TieGraph) -> tuple[float, ...]:
    if tg.n_ties == 0:
        raise ValueError("empty tie graph")
    q = np.quantile(tg.tie_weight, np.arange(1, 10) / 10)
    return tuple(float(x) for x in np.unique(q))


def default_local_candidates(tg: TieGraph) -> tuple[int, ...]:
    top = int(min(10, max(1, tg.graph.out_degree.max(initial=1))))
    return tuple(range(1, top + 1))


def _closest_to_mean(candidates: Sequence, counts: Sequence[int]):
    # |count - mean| compared as |len*count - total| to stay in integers
    total = sum(counts)
    k = len(counts)
    best = min(range(k), key=lambda i: (abs(k * counts[i] - total), candidates[i]))
    return candidates[best]


def select_global_threshold(tg: TieGraph, candidates: Sequence[float]):
    if tg.n_ties == 0:
        raise ValueError("empty tie graph")
    if len(candidates) == 0:
        raise ValueError("no global threshold candidates")
    w = tg.tie_weight
    counts = [int((w >= c).sum()) for c in candidates]
    return _closest_to_mean(list(candidates), counts)


def select_local_theta(tg: TieGraph, definition, candidates: Sequence[int]) -> int:
    definition = DefinitionId.parse(definition)
    if not definition.uses_local:
        raise ValueError(f"definition {definition.value} does not use a local threshold")
    if tg.n_ties == 0:
        raise ValueError("empty tie graph")
    if len(candidates) == 0:
        raise ValueError("no local threshold candidates")
    counts = [int(strong_mask(tg, definition, theta_local=c).sum()) for c in candidates]
    return _closest_to_mean(list(candidates), counts)


def strong_mask(
    tg: TieGraph, definition, theta_global: float | None = None, theta_local: int | None = None
) -> np.ndarray:
    """Boolean Strong indicator per tie for one definition."""
    d = DefinitionId.parse(definition)
    bi = tg.bidirectional
    total = tg.tie_weight
    if d is DefinitionId.I:
        return bi.copy()
    if d.uses_global:
        if theta_global is None:
            raise ValueError(f"definition {d.value} requires a global threshold")
        heavy = total >= theta_global
        return heavy & bi if d is DefinitionId.III else heavy
    if theta_local is None:
        raise ValueError(f"definition {d.value} requires a local threshold")
    if int(theta_local) != theta_local or theta_local < 1:
        raise ValueError(f"local threshold must be an integer >= 1, got {theta_local}")
    W = local_thresholds(tg.graph, int(theta_local))
    Wu, Wv = W[tg.u], W[tg.v]
    if d is DefinitionId.IV:
        return (tg.w_fwd >= Wu) & (tg.w_bwd >= Wv)
    if d is DefinitionId.V:
        return (tg.w_fwd >= Wu) | (tg.w_bwd >= Wv)
    local_sum = total >= Wu + Wv
    return local_sum & bi if d is DefinitionId.VII else local_sum


def assign_labels(
    tg: TieGraph, definition, theta_global: float | None = None, theta_local: int | None = None
) -> LabelSet:
    d = DefinitionId.parse(definition)
    strong = strong_mask(tg, d, theta_global, theta_local)
    return LabelSet(
        definition=d,
        strong=strong,
        tie_graph=tg,
        theta_global=theta_global if d.uses_global else None,
        theta_local=int(theta_local) if d.uses_local else None,
    )


def label_definition(tg: TieGraph, definition, config: ThresholdConfig | None = None) -> LabelSet:
    """Select this definition's threshold from the candidates, then label."""
    d = DefinitionId.parse(definition)
    config = config or ThresholdConfig()
    if d.uses_global:
        cands = config.global_candidates or default_global_candidates(tg)
        return assign_labels(tg, d, theta_global=select_global_threshold(tg, cands))
    if d.uses_local:
        cands = config.local_candidates or default_local_candidates(tg)
        return assign_labels(tg, d, theta_local=select_local_theta(tg, d, cands))
    return assign_labels(tg, d)


def label_all_definitions(
    tg: TieGraph, config: ThresholdConfig | None = None
) -> dict[DefinitionId, LabelSet]:
    return {d: label_definition(tg, d, config) for d in DEFINITIONS}
