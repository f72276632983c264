import random
from array import array

import pytest
from hypothesis import given, settings, strategies as st

from revac.engine import Role
from revac.graph import kernels
from revac.graph import _kernels_py
from revac.graph.acts import ActKind, EdgeKind, SocialAct, accuse, claim, defend, vote
from revac.graph.sag import SocialAlignmentGraph

from oracles import naive_collusion, naive_pressure, naive_ranking, random_acts


def graph_of(acts, n=6):
    g = SocialAlignmentGraph(range(n))
    for a in acts:
        g.record_act(a)
    return g


class TestActs:
    def test_self_accusation_rejected(self):
        with pytest.raises(ValueError):
            accuse(2, 2)

    def test_weights(self):
        g = graph_of([accuse(0, 1, turn=1), defend(2, 1, turn=2), vote(3, 1, turn=3)])
        assert [e.weight for e in g.edges] == [-1.0, 1.0, -2.0]
        assert [e.kind for e in g.edges] == [EdgeKind.ACCUSATION, EdgeKind.DEFENSE, EdgeKind.VOTE_ALIGNMENT]

    def test_round_trip(self):
        for act in (accuse(0, 1, 2, 3), claim(4, Role.DOCTOR, 1, 5)):
            assert SocialAct.from_dict(act.to_dict()) == act


class TestGraph:
    def test_claims_are_attributes_not_edges(self):
        g = graph_of([claim(0, Role.DETECTIVE, turn=1), claim(0, Role.VILLAGER, turn=2)])
        assert len(g) == 0
        assert g.latest_claim(0) is Role.VILLAGER

    def test_out_of_order_rejected(self):
        g = graph_of([accuse(0, 1, day=1, turn=5)])
        with pytest.raises(ValueError):
            g.record_act(accuse(1, 0, day=1, turn=4))

    def test_unknown_player(self):
        with pytest.raises(KeyError):
            graph_of([accuse(0, 9, turn=1)])

    def test_pressure_counts_distinct_accusers(self):
        g = graph_of([accuse(0, 3, turn=1), accuse(0, 3, turn=2), vote(1, 3, turn=3)])
        assert g.pressure_score(3) == (4.0, 2)

    def test_collusion_threshold(self):
        acts = [defend(1, 2, turn=1), defend(2, 1, turn=2), defend(1, 2, turn=3), defend(2, 1, turn=4)]
        g = graph_of(acts)
        assert g.collusion_pairs() == [((1, 2), 2.0)]
        assert g.collusion_pairs(threshold=3.0) == []
        assert graph_of(acts[:2]).collusion_pairs() == []

    def test_suspicion_ignores_viewer_edges(self):
        g = graph_of([accuse(0, 3, turn=1), accuse(1, 3, turn=2)])
        assert g.suspicion_scores(viewer=0)[3] == 1.0
        assert g.suspicion_scores()[3] == 2.0

    def test_ranking_skips_dead(self):
        g = graph_of([accuse(0, 3, turn=1)])
        g.mark_dead(3)
        assert 3 not in [p for p, _ in g.suspicion_ranking()]

    def test_export_round_trip(self):
        g = graph_of(random_acts(random.Random(4), 6, 40))
        g.mark_dead(2)
        h = SocialAlignmentGraph.from_dict(g.to_dict())
        assert h == g
        assert h.adjacency_lines() == g.adjacency_lines()
        assert h.suspicion_scores() == g.suspicion_scores()


class TestOracleEquivalence:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 64), st.integers(0, 2**32), st.floats(0, 4))
    def test_against_rescan(self, n, m, seed, threshold):
        rng = random.Random(seed)
        acts = random_acts(rng, n, m)
        g = graph_of(acts, n)
        dead = [p for p in range(n) if rng.random() < 0.2]
        for p in dead:
            g.mark_dead(p)
        alive = {p: p not in dead for p in range(n)}
        assert g.collusion_pairs(threshold) == naive_collusion(acts, n, threshold)
        for p in range(n):
            assert tuple(g.pressure_score(p)) == naive_pressure(acts, p)
        viewer = rng.choice([None, *range(n)])
        assert g.suspicion_ranking(viewer) == naive_ranking(acts, n, alive, viewer)
        for a in range(n):
            for b in range(n):
                assert g.mutual_support_score(a, b) == g.mutual_support_score(b, a)


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")
class TestCompiledKernels:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 200), st.integers(0, 2**32), st.integers(-1, 5))
    def test_matches_python_twin(self, n, m, seed, max_day):
        from revac.graph import _kernels

        rng = random.Random(seed)
        src, dst, w, day = array("q"), array("q"), array("d"), array("q")
        for i in range(m):
            src.append(rng.randrange(n))
            dst.append(rng.randrange(n))
            w.append(rng.choice((-2.0, -1.0, 1.0, 0.5)))
            day.append(i // 40)
        py = _kernels_py.pair_sums(n, src, dst, w, day, max_day)
        cy = _kernels.pair_sums(n, src, dst, w, day, max_day)
        assert [list(x) for x in py] == [list(x) for x in cy]
        ex = rng.randrange(-1, n)
        assert [list(x) for x in _kernels_py.in_scores(n, *py, ex)] == [list(x) for x in _kernels.in_scores(n, *cy, ex)]
        t = rng.choice([0.0, 1.0, 2.0])
        assert list(_kernels_py.mutual_pairs(n, py[0], t)) == list(_kernels.mutual_pairs(n, cy[0], t))


def test_backend_selection_env(monkeypatch):
    import importlib

    monkeypatch.setenv("REVAC_PURE_PYTHON", "1")
    reloaded = importlib.reload(kernels)
    try:
        assert reloaded.BACKEND == "python"
        assert reloaded.pair_sums is _kernels_py.pair_sums
    finally:
        monkeypatch.delenv("REVAC_PURE_PYTHON")
        importlib.reload(kernels)
