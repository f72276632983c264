"""Player profiles, act extraction and contradiction grounding."""

from .extract import AbilityRef, act_summary, extract_ability_refs, extract_acts
from .store import (
    ABILITY_ROLE,
    DEFAULT_DIGEST_CAP,
    ContradictionKind,
    ContradictionRecord,
    Fact,
    PlayerProfile,
    RevacMemory,
    SequencingError,
    detect_contradictions,
    update_memory,
    validate_contradiction,
)
