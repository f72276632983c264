import pytest
from hypothesis import given, settings, strategies as st

from revac.agents import ScriptedAgent
from revac.arena import MatchConfig, run_match
from revac.engine import (
    GameConfig,
    NightAction,
    NightActionKind,
    Role,
    cast_vote,
    new_game,
    observation_for,
    record_statement,
    resolve_night,
    start_voting,
    submit_night_action,
    tally_votes,
)
from revac.graph.acts import ActKind
from revac.memory import (
    ContradictionKind,
    RevacMemory,
    SequencingError,
    detect_contradictions,
    extract_ability_refs,
    extract_acts,
    validate_contradiction,
)

ROSTER = range(6)


def kinds(acts):
    return [(a.kind, a.src, a.dst, a.role) for a in acts]


class TestExtraction:
    @pytest.mark.parametrize("text,expected", [
        ("I accuse Player 2", [(ActKind.ACCUSE, 1, 2, None)]),
        ("P3 is mafia", [(ActKind.ACCUSE, 1, 3, None)]),
        ("I think p4 seems really suspicious", [(ActKind.ACCUSE, 1, 4, None)]),
        ("P0 is town.", [(ActKind.DEFEND, 1, 0, None)]),
        ("I trust P5", [(ActKind.DEFEND, 1, 5, None)]),
        ("I'm just a villager", [(ActKind.CLAIM, 1, None, Role.VILLAGER)]),
        ("I vote Player 99", []),
        ("P1 is mafia", []),  # self-reference
        ("", []),
    ])
    def test_acts(self, text, expected):
        assert kinds(extract_acts(text, ROSTER, 1)) == expected

    def test_protection_implies_doctor_claim(self):
        assert kinds(extract_acts("I protected P3", ROSTER, 4)) == [
            (ActKind.DEFEND, 4, 3, None), (ActKind.CLAIM, 4, None, Role.DOCTOR)]

    def test_check_result(self):
        acts = extract_acts("I am the Detective. I checked P3 on N0 and P3 is Mafia.", ROSTER, 0)
        assert (ActKind.CLAIM, 0, None, Role.DETECTIVE) in kinds(acts)
        assert (ActKind.ACCUSE, 0, 3, None) in kinds(acts)

    def test_gerund_gives_reference_not_claim(self):
        text = "I'm a Villager. I was investigating P0 last night."
        assert kinds(extract_acts(text, ROSTER, 1)) == [(ActKind.CLAIM, 1, None, Role.VILLAGER)]
        refs = extract_ability_refs(text, ROSTER, 1, day=1)
        assert [(r.ability, r.target, r.night) for r in refs] == [(NightActionKind.INVESTIGATE, 0, 1)]

    @pytest.mark.parametrize("text", ["P3 cannot have checked P1.", "I did not protect P2.", "P4 checked P2."])
    def test_third_person_and_negated_refs_ignored(self, text):
        assert extract_ability_refs(text, ROSTER, 0, day=1) == []

    @given(st.text(max_size=200))
    def test_never_crashes_and_stays_in_roster(self, text):
        for act in extract_acts(text, ROSTER, 2):
            assert act.src == 2
            assert act.dst is None or (act.dst in ROSTER and act.dst != 2)


def day_zero(statements, kill=None, roles=None):
    state = new_game(GameConfig(), roles or [Role.DETECTIVE, Role.VILLAGER, Role.VILLAGER, Role.MAFIA, Role.MAFIA,
                                             Role.DOCTOR])
    if kill is not None:
        submit_night_action(state, 3, NightAction(NightActionKind.KILL, kill))
    resolve_night(state)
    for speaker, text in statements:
        record_statement(state, speaker, text, extract_acts(text, ROSTER, speaker))
    return state


def memory_for(state, viewer=1):
    obs = observation_for(state, viewer)
    return RevacMemory.for_observation(obs).update(obs.events())


class TestStore:
    def test_rejects_stale_events(self):
        state = day_zero([(0, "hello")])
        mem = memory_for(state)
        with pytest.raises(SequencingError):
            mem.update(state.events[-1:])

    def test_incremental_equals_batch(self):
        state = day_zero([(0, "I accuse P3"), (3, "P0 is lying"), (4, "I trust P3"), (2, "")])
        events = observation_for(state, 1).events()
        batch = memory_for(state)
        inc = RevacMemory(1, ROSTER, None)
        for ev in events:
            inc.update([ev])
        assert inc.to_dict() == batch.to_dict()

    def test_private_results_only_for_owner(self):
        state = new_game(GameConfig(), [Role.DETECTIVE, Role.VILLAGER, Role.VILLAGER, Role.MAFIA, Role.MAFIA,
                                        Role.DOCTOR])
        submit_night_action(state, 0, NightAction(NightActionKind.INVESTIGATE, 3))
        resolve_night(state)
        assert memory_for(state, 0).known_alignment(3).value == "Mafia"
        assert memory_for(state, 1).known_alignment(3) is None

    def test_silence_and_digest_cap(self):
        state = day_zero([(2, "")] + [(0, f"P{3 + i % 2} is sus") for i in range(12)])
        mem = memory_for(state)
        assert mem.profiles[2].silences == 1
        assert len(mem.profiles[0].statement_digest) == mem.digest_cap

    def test_votes_become_edges(self):
        state = day_zero([])
        start_voting(state)
        cast_vote(state, 0, 3)
        tally_votes(state)
        mem = memory_for(state)
        assert mem.profiles[0].votes_cast[0][0] == 3
        assert mem.graph.net_weight(0, 3) == -2.0


class TestContradictions:
    def test_counter_claims(self):
        state = day_zero([
            (0, "I am the Detective."), (3, "I am the Detective."),
            (4, "I am the Doctor."), (5, "I am the Doctor."),
        ])
        found = {(r.kind, r.subjects) for r in detect_contradictions(memory_for(state))}
        assert (ContradictionKind.COUNTER_CLAIM, (0, 3)) in found
        assert (ContradictionKind.COUNTER_CLAIM, (4, 5)) in found

    def test_villager_claims_never_conflict(self):
        state = day_zero([(0, "I'm a Villager."), (3, "I'm a Villager.")])
        assert detect_contradictions(memory_for(state)) == []

    def test_self_contradiction(self):
        state = day_zero([(3, "I'm a Villager."), (3, "I am the Doctor.")])
        kinds_ = [r.kind for r in detect_contradictions(memory_for(state))]
        assert kinds_ == [ContradictionKind.SELF_CONTRADICTION]

    def test_mismatch_and_impossible_reference(self):
        state = day_zero([(4, "hi")], kill=0)
        start_voting(state)
        tally_votes(state)
        resolve_night(state)
        text = "I'm a Villager. I was investigating P0 last night."
        record_statement(state, 1, text, extract_acts(text, ROSTER, 1))
        found = detect_contradictions(memory_for(state, 2))
        assert {r.kind for r in found} == {ContradictionKind.ROLE_ABILITY_MISMATCH,
                                           ContradictionKind.IMPOSSIBLE_REFERENCE}
        assert all(r.subjects == (1,) for r in found)

    def test_records_validate_independently(self):
        state = day_zero([(0, "I am the Detective."), (3, "I am the Detective."), (3, "I'm a Villager."),
                          (3, "I am the Detective.")])
        events = {e.seq: e for e in state.events}
        records = detect_contradictions(memory_for(state))
        assert records
        assert all(validate_contradiction(r, events, ROSTER) for r in records)

    def test_validator_rejects_forged_evidence(self):
        state = day_zero([(0, "I am the Detective."), (3, "I am the Detective."), (4, "nice weather")])
        events = {e.seq: e for e in state.events}
        (rec,) = detect_contradictions(memory_for(state))
        forged = type(rec)(rec.kind, rec.subjects, (rec.evidence[0], state.events[-1].seq), rec.day, rec.detail)
        assert not validate_contradiction(forged, events, ROSTER)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32))
    def test_every_record_in_played_games_validates(self, seed):
        cfg = GameConfig(seed=seed)
        agents = [ScriptedAgent(i, "random", seed) for i in range(6)]
        result = run_match(MatchConfig(cfg, ("scripted:random",) * 6, seed), agents)
        events = {e.seq: e for e in result.state.events}
        mem = RevacMemory(0, ROSTER, None).update([e for e in result.state.events if e.is_public])
        for rec in detect_contradictions(mem):
            assert validate_contradiction(rec, events, ROSTER), rec
