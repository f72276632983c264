import copy
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from revac.agents import ScriptedAgent
from revac.arena import MatchConfig, run_match
from revac.engine import (
    Alignment,
    ConfigError,
    EventKind,
    GameConfig,
    IllegalActionError,
    NightAction,
    NightActionKind,
    PhaseError,
    Role,
    apply_input_event,
    assign_roles,
    cast_vote,
    new_game,
    observation_for,
    plurality,
    record_statement,
    resolve_night,
    start_voting,
    submit_night_action,
    tally_votes,
)
from revac.engine.types import INPUT_EVENTS, Event

from oracles import InvariantChecker, brute_plurality

KILL, PROTECT, INVESTIGATE = NightActionKind.KILL, NightActionKind.PROTECT, NightActionKind.INVESTIGATE


def to_day(state, kill=None, protect=None, investigate=None):
    if kill is not None:
        submit_night_action(state, 3, NightAction(KILL, kill))
    if protect is not None:
        submit_night_action(state, 1, NightAction(PROTECT, protect))
    if investigate is not None:
        submit_night_action(state, 2, NightAction(INVESTIGATE, investigate))
    resolve_night(state)
    return state


class TestConfig:
    def test_default_is_valid(self):
        GameConfig().validate()

    @pytest.mark.parametrize("counts", [
        {Role.VILLAGER: 3, Role.MAFIA: 3},
        {Role.VILLAGER: 6},
        {Role.VILLAGER: 2, Role.MAFIA: 2},
    ])
    def test_rejects_bad_role_counts(self, counts):
        with pytest.raises(ConfigError):
            GameConfig(num_players=6, role_counts=counts).validate()

    def test_round_trip(self):
        cfg = GameConfig(seed=99, max_days=4)
        assert GameConfig.from_dict(cfg.to_dict()) == cfg

    def test_public_echo_hides_seed(self):
        assert "seed" not in GameConfig(seed=5).public_dict()

    @given(st.integers(0, 2**64 - 1))
    def test_deal_respects_counts(self, seed):
        cfg = GameConfig(seed=seed)
        assert Counter(assign_roles(cfg)) == Counter({Role.VILLAGER: 2, Role.DOCTOR: 1, Role.DETECTIVE: 1, Role.MAFIA: 2})

    def test_deal_is_seeded(self):
        assert assign_roles(GameConfig(seed=3)) == assign_roles(GameConfig(seed=3))
        deals = {tuple(assign_roles(GameConfig(seed=s))) for s in range(50)}
        assert len(deals) > 10


class TestNight:
    def test_starts_at_night_zero(self, state):
        assert state.phase.is_night and state.phase.day == 0
        assert state.events[0].kind is EventKind.GAME_STARTED

    def test_protected_kill_is_no_death(self, state):
        to_day(state, kill=0, protect=0)
        resolved = [e for e in state.events if e.kind is EventKind.NIGHT_RESOLVED][0]
        assert resolved.payload["death"] is None
        assert all(p.alive for p in state.players)
        assert state.phase.is_discussion

    def test_unprotected_kill(self, state):
        to_day(state, kill=2, protect=0)
        assert not state.players[2].alive
        elim = [e for e in state.events if e.kind is EventKind.PLAYER_ELIMINATED][0]
        assert elim.payload == {"player": 2, "revealed_role": "Detective", "cause": "night"}

    def test_no_kill_submitted(self, state):
        to_day(state)
        assert all(p.alive for p in state.players)

    def test_investigation_is_private(self, state):
        to_day(state, investigate=3)
        result = [e for e in state.events if e.kind is EventKind.INVESTIGATION_RESULT][0]
        assert result.payload["alignment"] == "Mafia"
        assert result.visibility == (2,)
        assert result not in observation_for(state, 0).private_events
        assert result in observation_for(state, 2).private_events

    def test_kill_choice_visible_to_partners_only(self, state):
        submit_night_action(state, 4, NightAction(KILL, 0))
        ev = state.events[-1]
        assert ev.visibility == (3, 4)

    def test_lowest_id_mafia_decides(self, state):
        submit_night_action(state, 4, NightAction(KILL, 0))
        submit_night_action(state, 3, NightAction(KILL, 5))
        submit_night_action(state, 4, NightAction(KILL, 1))
        assert state.night.mafia_target == 5

    @pytest.mark.parametrize("actor,action", [
        (0, NightAction(KILL, 1)),          # villager has no ability
        (1, NightAction(KILL, 0)),          # doctor cannot kill
        (3, NightAction(PROTECT, 3)),
    ])
    def test_wrong_ability(self, state, actor, action):
        with pytest.raises(IllegalActionError):
            submit_night_action(state, actor, action)

    def test_dead_actor_rejected(self, state):
        to_day(state, kill=1)
        start_voting(state)
        tally_votes(state)
        with pytest.raises(IllegalActionError):
            submit_night_action(state, 1, NightAction(PROTECT, 0))

    def test_day_actions_rejected_at_night(self, state):
        with pytest.raises(PhaseError):
            record_statement(state, 0, "hi")
        with pytest.raises(PhaseError):
            cast_vote(state, 0, 1)


class TestDay:
    def test_vote_elimination(self, state):
        to_day(state)
        start_voting(state)
        for voter in (0, 1, 2):
            cast_vote(state, voter, 3)
        cast_vote(state, 3, 0)
        _, out = tally_votes(state)
        assert out == 3 and not state.players[3].alive
        assert state.phase.is_night and state.phase.day == 1

    def test_tie_means_no_elimination(self, state):
        to_day(state)
        start_voting(state)
        cast_vote(state, 0, 3)
        cast_vote(state, 3, 0)
        _, out = tally_votes(state)
        assert out is None and all(p.alive for p in state.players)

    def test_revote_replaces(self, state):
        to_day(state)
        start_voting(state)
        cast_vote(state, 0, 3)
        cast_vote(state, 0, 4)
        assert state.votes == {0: 4}

    def test_statement_from_dead_rejected(self, state):
        to_day(state, kill=0)
        with pytest.raises(IllegalActionError):
            record_statement(state, 0, "boo")

    def test_village_wins_when_mafia_gone(self, state):
        for target in (3, 4):
            to_day(state)
            start_voting(state)
            for voter in state.living():
                if voter != target:
                    cast_vote(state, voter, target)
            tally_votes(state)
        assert state.winner is Alignment.VILLAGE
        assert state.events[-1].kind is EventKind.GAME_ENDED

    def test_mafia_win_at_parity(self, state):
        to_day(state, kill=0)
        start_voting(state)
        for voter in (1, 3, 4):
            cast_vote(state, voter, 2)
        tally_votes(state)
        # P1, P5 left against two Mafia: parity on the mislynch itself
        assert state.winner is Alignment.MAFIA
        assert state.events[-1].payload["reason"] == "elimination"

    def test_stalemate_at_max_days(self):
        st_ = new_game(GameConfig(max_days=1), [Role.VILLAGER, Role.DOCTOR, Role.DETECTIVE, Role.MAFIA, Role.MAFIA,
                                                  Role.VILLAGER])
        resolve_night(st_)
        start_voting(st_)
        tally_votes(st_)
        assert st_.winner is Alignment.MAFIA
        assert st_.events[-1].payload["reason"] == "stalemate"


class TestPlurality:
    @given(st.dictionaries(st.integers(0, 7), st.integers(0, 7), max_size=8), st.randoms())
    def test_order_independent_and_matches_brute_force(self, votes, rnd):
        items = list(votes.items())
        rnd.shuffle(items)
        assert plurality(dict(items)) == brute_plurality(votes)


class TestObservation:
    @pytest.mark.parametrize("seed", range(5))
    def test_cached_split_matches_rescan(self, seed):
        result = run_match(MatchConfig(GameConfig(seed=seed), ("scripted:random",) * 6, seed))
        state = result.state
        for viewer in range(6):
            obs = observation_for(state, viewer)
            assert obs.public_events == tuple(e for e in state.events if e.visibility is None)
            assert obs.private_events == tuple(e for e in state.events if e.visibility and viewer in e.visibility)
        state.events = state.events[:10]  # a replaced log resets the cache
        assert observation_for(state, 0).events() == [e for e in state.events
                                                      if e.visibility is None or 0 in e.visibility]

    def test_partners_only_for_mafia(self, state):
        assert observation_for(state, 3).partners == {4}
        assert observation_for(state, 0).partners == frozenset()

    def test_revealed_roles(self, state):
        to_day(state, kill=2)
        assert observation_for(state, 0).revealed_roles == {2: Role.DETECTIVE}

    def test_events_merge_in_seq_order(self, state):
        to_day(state, kill=0, investigate=4)
        seqs = [e.seq for e in observation_for(state, 2).events()]
        assert seqs == sorted(seqs)


class TestEventRecords:
    def test_round_trip(self, state):
        to_day(state, kill=0, protect=1, investigate=3)
        for ev in state.events:
            assert Event.from_record(ev.to_record()) == ev

    def test_replay_inputs_reproduce_state(self, state):
        to_day(state, kill=0, protect=1, investigate=3)
        record_statement(state, 2, "P3 is mafia")
        start_voting(state)
        cast_vote(state, 2, 3)
        tally_votes(state)
        fresh = new_game(state.config, state.roles)
        for ev in state.events[1:]:
            if ev.kind in INPUT_EVENTS and len(fresh.events) == ev.seq:
                apply_input_event(fresh, ev)
        assert [e.to_record() for e in fresh.events] == [e.to_record() for e in state.events]
        assert fresh.digest() == state.digest()


class TestRandomPlayouts:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32), st.sampled_from(["random", "strong", "killer", "passive"]))
    def test_invariants_hold(self, seed, policy):
        cfg = GameConfig(seed=seed)
        agents = [ScriptedAgent(i, policy, seed) for i in range(cfg.num_players)]
        checker = {}

        def observe(state):
            checker.setdefault("c", InvariantChecker(state))(state)

        result = run_match(MatchConfig(cfg, (f"scripted:{policy}",) * 6, seed), agents, observe)
        assert result.state.phase.is_ended
        assert checker["c"].steps > 0

    def test_state_copy_is_independent(self, state):
        snap = copy.deepcopy(state)
        to_day(state, kill=0)
        assert snap.players[0].alive and len(snap.events) < len(state.events)
