import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import undirected
from oracles import min_vertex_cover_size, open_wedges
from tiestrength.graph import build_tie_graph
from tiestrength.stc import enumerate_wedges, greedy_weak_cover, stc_greedy, verify_stc
from tiestrength.synthetic import random_graph

pairs_st = st.lists(
    st.tuples(st.integers(0, 8), st.integers(0, 8)).filter(lambda p: p[0] != p[1]),
    min_size=1, max_size=20,
)

STAR = [(0, 1), (0, 2), (0, 3)]


def test_path_has_one_wedge():
    w = enumerate_wedges(undirected([(0, 1), (1, 2)]))
    assert w.pairs() == {(0, 1)}
    assert w.center.tolist() == [1]


def test_triangle_has_no_wedge():
    assert len(enumerate_wedges(undirected([(0, 1), (1, 2), (0, 2)]))) == 0


def test_star_wedges_are_leaf_pairs():
    w = enumerate_wedges(undirected(STAR))
    assert w.pairs() == {(0, 1), (0, 2), (1, 2)}
    assert w.center.tolist() == [0, 0, 0]


def test_path_marks_smaller_index_weak():
    ls = stc_greedy(undirected([(0, 1), (1, 2)]))
    assert ls.strong.tolist() == [False, True]


def test_triangle_is_all_strong():
    assert stc_greedy(undirected([(0, 1), (1, 2), (0, 2)])).strong.all()


def test_star_needs_two_weak_ties():
    tg = undirected(STAR)
    ls = stc_greedy(tg)
    assert ls.n_weak == 2
    assert min_vertex_cover_size(3, open_wedges(tg.pairs())) == 2


def test_verify_counts_violations():
    tg = undirected(STAR)
    assert verify_stc(tg, np.ones(3, dtype=bool)) == 3
    assert verify_stc(tg, np.zeros(3, dtype=bool)) == 0
    assert verify_stc(tg, stc_greedy(tg)) == 0


def test_verify_rejects_wrong_length():
    with pytest.raises(ValueError):
        verify_stc(undirected(STAR), np.ones(2, dtype=bool))


@given(pairs_st)
def test_wedges_match_pairwise_oracle(pairs):
    tg = undirected(pairs)
    want = {tuple(sorted(s)) for s in open_wedges(tg.pairs())}
    assert enumerate_wedges(tg).pairs() == want


@given(pairs_st)
def test_greedy_output_satisfies_stc(pairs):
    tg = undirected(pairs)
    assert verify_stc(tg, stc_greedy(tg)) == 0


@given(pairs_st)
def test_greedy_is_minimal_in_the_sense_of_every_weak_tie_covering_something(pairs):
    tg = undirected(pairs)
    w = enumerate_wedges(tg)
    weak = greedy_weak_cover(w)
    deg = w.degree()
    assert not (weak & (deg == 0)).any()


def test_greedy_on_larger_random_graphs():
    for seed in range(5):
        tg = build_tie_graph(random_graph(40, 0.15, seed))
        assert verify_stc(tg, stc_greedy(tg)) == 0
