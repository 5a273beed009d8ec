"""Provider contract, prompt templates and reply parsing."""

from .gateway import CallRecord, Gateway, complete
from .messages import STAGES, LlmRequest, LlmResponse, Stage, Usage
from .parsing import (
    CAUSES,
    NOT_FOUND,
    PLACEMENTS,
    AbstractDecision,
    CorrectionCause,
    Verdict,
    parse_anchor,
    parse_cause,
    parse_decision,
    parse_verdict,
    parse_widget_id,
    render_cause,
    render_decision,
    render_verdict,
)
from .providers import HttpProvider, ScriptedProvider, ScriptEntry, load_script, provider_from_selector
from .templates import PROMPTS, PromptTemplate, load_templates

__all__ = [
    "CAUSES", "NOT_FOUND", "PLACEMENTS", "PROMPTS", "STAGES",
    "AbstractDecision", "CallRecord", "CorrectionCause", "Gateway", "HttpProvider", "LlmRequest",
    "LlmResponse", "PromptTemplate", "ScriptEntry", "ScriptedProvider", "Stage", "Usage", "Verdict",
    "complete", "load_script", "load_templates", "parse_anchor", "parse_cause", "parse_decision",
    "parse_verdict", "parse_widget_id", "provider_from_selector", "render_cause", "render_decision",
    "render_verdict",
]
