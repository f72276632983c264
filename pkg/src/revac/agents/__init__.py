from .agent import AgentSettings, RevacAgent, Variant, agent_step, current_view
from .backend import (
    Backend,
    BackendError,
    BackendRequest,
    BackendResponse,
    CannedBackend,
    ChatCompletionsBackend,
    FlakyBackend,
    GenerationParams,
    Segment,
    TracingBackend,
    build_request,
    call_with_retries,
)
from .executor import AgentAction, Night, Say, Vote, default_action, execute_action, is_legal, template_speech
from .review import Review, ReviewSettings, adjusted_suspicion, knowledge_for, recommend, review, rule_review, vote_target
from .scripted import POLICIES, ScriptedAgent
from .spec import AgentSpec
from .tone import DIRECTIVES, Tone, ToneContext, ToneProfile, ToneSettings, is_lylo, select_tone, tone_context
