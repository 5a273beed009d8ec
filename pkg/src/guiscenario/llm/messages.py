"""Request and response records exchanged with LLM providers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..raster import RasterImage


class Stage(str, Enum):
    """The six token-accounting stages, in ledger order T1..T6."""

    LOGICAL_DECISION = "logical_decision"
    WIDGET_LOCALIZATION = "widget_localization"
    LOADING_CHECK = "loading_check"
    TRANSITION_CHECK = "transition_check"
    COMPLETION_CHECK = "completion_check"
    SELF_CORRECTION = "self_correction"


STAGES = tuple(Stage)


@dataclass(frozen=True)
class Usage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def __post_init__(self):
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be non-negative")

    @property
    def total(self) -> int:
        return self.prompt_tokens + self.completion_tokens

    def to_dict(self):
        return {"prompt_tokens": self.prompt_tokens, "completion_tokens": self.completion_tokens}

    @classmethod
    def from_dict(cls, d):
        d = d or {}
        return cls(int(d.get("prompt_tokens", 0)), int(d.get("completion_tokens", 0)))


@dataclass(frozen=True)
class LlmRequest:
    stage: Stage
    text: str
    images: tuple[RasterImage, ...] = ()
    max_tokens: int = 1024
    temperature: float = 0.0
    # Prompt id inside the stage (e.g. "change_check" within transition_check); not a ledger key.
    prompt: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "stage", Stage(self.stage))
        object.__setattr__(self, "images", tuple(self.images))
        if self.temperature != 0.0:
            raise ValueError("temperature is fixed at 0")


@dataclass(frozen=True)
class LlmResponse:
    text: str
    usage: Usage = field(default_factory=Usage)
