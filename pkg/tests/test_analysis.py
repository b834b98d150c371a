import itertools
import math

import numpy as np
import pytest

from conftest import tie_graph, undirected
from oracles import pearson
from tiestrength.analysis import (
    class_weight_means,
    definition_matrices,
    dissolution_study,
    distribution_table,
    future_label_evaluation,
    relabel_future,
    resilience_from_rates,
    strong_ratio,
)
from tiestrength.graph import build_snapshot_series, build_tie_graph
from tiestrength.labeling import LabelSet, label_all_definitions, label_definition
from tiestrength.synthetic import dissolving_snapshots, random_graph

REFERENCE_RATES = {
    # definition: ((strong, weak) at 4, 8 and 12 weeks), in percent
    "I": ((0.82, 0.95), (1.37, 1.78), (1.92, 2.83)),
    "II": ((0.77, 0.93), (1.46, 1.69), (2.18, 2.64)),
    "III": ((0.79, 0.92), (1.38, 1.69), (1.99, 2.63)),
    "IV": ((0.83, 0.94), (1.54, 1.70), (2.36, 2.65)),
    "V": ((0.89, 0.93), (1.62, 1.70), (2.42, 2.67)),
    "VI": ((0.86, 1.01), (1.51, 1.93), (2.29, 3.09)),
    "VII": ((0.83, 0.93), (1.38, 1.72), (1.81, 2.73)),
}


def reference_report():
    strong, weak = {}, {}
    for d, rows in REFERENCE_RATES.items():
        for dt, (s, w) in zip((4, 8, 12), rows):
            strong[(d, dt)] = s / 100
            weak[(d, dt)] = w / 100
    return resilience_from_rates(strong, weak)


def test_strong_ratio_examples():
    tg = tie_graph([(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)])
    assert strong_ratio(label_definition(tg, "I")) == 1.0
    g = build_tie_graph(random_graph(12, 0.2, 3))
    ls = label_definition(g, "I")
    assert strong_ratio(ls) == sum(ls.strong.tolist()) / g.n_ties


def test_class_weight_means():
    tg = tie_graph([(0, 1, 10.0), (1, 2, 2.0)])
    ls = LabelSet("x", np.array([True, False]), tg)
    assert class_weight_means(ls) == (10.0, 2.0)
    assert class_weight_means(LabelSet("x", np.array([True, True]), tg))[1] is None


def test_def_ii_strong_mean_at_least_theta():
    tg = build_tie_graph(random_graph(20, 0.2, 1))
    ls = label_definition(tg, "II")
    assert class_weight_means(ls)[0] >= ls.theta_global


def test_fifteen_tie_means_against_recomputation():
    tg = build_tie_graph(random_graph(10, 0.2, 11))
    ls = label_definition(tg, "VI")
    s = [w for w, k in zip(tg.tie_weight.tolist(), ls.strong.tolist()) if k]
    w = [w for w, k in zip(tg.tie_weight.tolist(), ls.strong.tolist()) if not k]
    ms, mw = class_weight_means(ls)
    assert ms == pytest.approx(sum(s) / len(s))
    assert mw == pytest.approx(sum(w) / len(w))


def test_identical_and_complementary_label_sets():
    tg = undirected([(0, 1), (1, 2), (2, 3), (3, 4)])
    a = LabelSet("a", np.array([True, True, False, False]), tg)
    b = LabelSet("b", ~a.strong, tg)
    pear, eucl = definition_matrices({"a": a, "a2": a, "b": b})
    assert pear["a", "a2"] == 1.0 and eucl["a", "a2"] == 0.0
    assert pear["a", "b"] == -1.0 and eucl["a", "b"] == 1.0


def test_constant_vector_gives_undefined_pearson():
    tg = undirected([(0, 1), (1, 2)])
    a = LabelSet("a", np.array([True, True]), tg)
    b = LabelSet("b", np.array([True, False]), tg)
    pear, _ = definition_matrices({"a": a, "b": b})
    assert math.isnan(pear["a", "b"]) and math.isnan(pear["a", "a"])
    assert pear["b", "b"] == 1.0


def test_matrices_match_recomputation_and_are_well_formed():
    tg = build_tie_graph(random_graph(18, 0.17, 2))
    sets = label_all_definitions(tg)
    pear, eucl = definition_matrices(sets)
    names = pear.names
    vecs = {d.value: ls.strong.astype(float).tolist() for d, ls in sets.items()}
    k = tg.n_ties
    for a, b in itertools.product(names, names):
        r = pearson(vecs[a], vecs[b])
        if math.isnan(r):
            assert math.isnan(pear[a, b])
        else:
            assert pear[a, b] == pytest.approx(1.0 if a == b else r)
            assert -1 <= pear[a, b] <= 1
        d = math.sqrt(sum((x - y) ** 2 for x, y in zip(vecs[a], vecs[b])) / k)
        assert eucl[a, b] == pytest.approx(d)
    assert np.allclose(np.nan_to_num(pear.values), np.nan_to_num(pear.values).T)
    assert np.allclose(eucl.values, eucl.values.T)
    for a, b, c in itertools.permutations(names, 3):
        assert eucl[a, c] <= eucl[a, b] + eucl[b, c] + 1e-12


def test_long_form_rows():
    tg = undirected([(0, 1), (1, 2)])
    a = LabelSet("a", np.array([True, False]), tg)
    pear, _ = definition_matrices({"a": a})
    assert pear.long_form() == [("a", "a", 1.0, "pearson")]


def test_reference_rates_reproduce_row_and_grand_means():
    rep = reference_report()
    by_def = rep.ratio_by_definition()
    expected_rows = {"I": 1.31, "II": 1.19, "III": 1.24, "IV": 1.12, "V": 1.07, "VI": 1.27, "VII": 1.29}
    for d, r in expected_rows.items():
        assert by_def[d] == pytest.approx(r, abs=0.006)
    by_dt = rep.ratio_by_horizon()
    for dt, r in {4: 1.14, 8: 1.19, 12: 1.30}.items():
        assert by_dt[dt] == pytest.approx(r, abs=0.006)
    assert rep.R == pytest.approx(1.21, abs=0.01)


def test_static_series_has_zero_rates():
    recs = [(0, 1, 1.0), (1, 0, 2.0), (1, 2, 1.0), (2, 3, 4.0)]
    series = build_snapshot_series({0: recs, 1: recs, 2: recs})
    tg0 = series.tie_graph_at(0)
    labels = {"I": label_definition(tg0, "I")}
    rep = dissolution_study(tg0, labels, series, 0, [1, 2])
    assert set(rep.strong_rate.values()) == {0.0}
    assert set(rep.weak_rate.values()) == {0.0}


def test_dissolution_errors():
    recs = [(0, 1, 1.0), (1, 2, 1.0)]
    series = build_snapshot_series({0: recs, 1: recs})
    tg0 = series.tie_graph_at(0)
    with pytest.raises(KeyError):
        dissolution_study(tg0, {"I": LabelSet("I", np.array([True, False]), tg0)}, series, 0, [3])
    with pytest.raises(ValueError):
        dissolution_study(tg0, {"I": label_definition(tg0, "I")}, series, 0, [1])


def test_planted_dissolution_rates_are_monotone():
    tg0 = build_tie_graph(random_graph(60, 0.1, 5))
    ls = label_definition(tg0, "VI")
    series = dissolving_snapshots(tg0, ls.strong, weak_step=0.1, strong_step=0.05, n_snapshots=4)
    rep = dissolution_study(tg0, {"VI": ls}, series, 0, [1, 2, 3])
    s = [rep.strong_rate[("VI", dt)] for dt in (1, 2, 3)]
    w = [rep.weak_rate[("VI", dt)] for dt in (1, 2, 3)]
    assert s == sorted(s) and w == sorted(w)
    assert rep.R > 1


def test_future_evaluation_identity_and_counts():
    recs0 = [(0, 1, 5.0), (1, 0, 5.0), (1, 2, 1.0), (2, 3, 2.0), (3, 2, 2.0)]
    recs1 = [(0, 1, 5.0), (1, 2, 1.0), (2, 1, 1.0)]
    series = build_snapshot_series({0: recs0, 1: recs1})
    tg0, tg1 = series.tie_graph_at(0), series.tie_graph_at(1)
    lab0 = label_definition(tg0, "I")
    pred = lab0.strong.copy()
    fut = {0: lab0, 1: relabel_future(tg1, lab0)}
    pts = future_label_evaluation(pred, tg0, fut)
    assert (pts[0].accuracy, pts[0].n_surviving) == (1.0, 3)
    # survivors at week 1: 0-1 (now one-way, weak; predicted strong), 1-2 (now mutual; predicted weak)
    assert (pts[1].accuracy, pts[1].n_surviving) == (0.0, 2)


def test_future_evaluation_needs_survivors():
    series = build_snapshot_series({0: [(0, 1, 1.0)], 1: [(2, 3, 1.0)]})
    tg0 = series.tie_graph_at(0)
    lab1 = label_definition(series.tie_graph_at(1), "I")
    with pytest.raises(ValueError, match="survives"):
        future_label_evaluation(np.array([True]), tg0, {1: lab1})


def test_frozen_thresholds_reuse_reference():
    tg0 = build_tie_graph(random_graph(15, 0.3, 1))
    tg1 = build_tie_graph(random_graph(15, 0.3, 2))
    ref = label_definition(tg0, "II")
    frozen = relabel_future(tg1, ref, reselect=False)
    assert frozen.theta_global == ref.theta_global


def test_distribution_table_recomputes():
    tg = build_tie_graph(random_graph(15, 0.3, 1))
    sets = label_all_definitions(tg)
    rows = distribution_table(sets)
    assert [r["definition"] for r in rows] == ["I", "II", "III", "IV", "V", "VI", "VII"]
    for r, ls in zip(rows, sets.values()):
        assert r["strong_ratio"] == ls.strong.mean()
        assert (r["mean_strong_weight"], r["mean_weak_weight"]) == class_weight_means(ls)
