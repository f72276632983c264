"""Deterministic Secret Mafia engine."""

from .game import (
    GameState,
    Observation,
    apply_input_event,
    assign_roles,
    cast_vote,
    check_win,
    is_legal_night_action,
    is_legal_vote,
    legal_night_action,
    new_game,
    observation_for,
    plurality,
    record_statement,
    resolve_night,
    start_voting,
    submit_night_action,
    tally_votes,
)
from .types import (
    DEFAULT_ROLE_COUNTS,
    INPUT_EVENTS,
    ROLE_ABILITY,
    VILLAGE_ROLES,
    Alignment,
    ConfigError,
    Event,
    EventKind,
    GameConfig,
    GameError,
    IllegalActionError,
    NightAction,
    NightActionBuffer,
    NightActionKind,
    Phase,
    PhaseError,
    PhaseKind,
    PlayerState,
    Role,
    Stage,
)
