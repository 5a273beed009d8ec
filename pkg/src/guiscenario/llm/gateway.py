"""Prompt rendering, provider calls and the one-re-prompt repair rule."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseFailure, StepError
from .messages import LlmRequest, LlmResponse, Stage
from .templates import PROMPTS, load_templates

REPROMPT = (
    "\n\nYour previous reply could not be used ({error}). "
    "Answer again and follow the required reply format exactly."
)
MAX_IMAGES = 2


@dataclass(frozen=True)
class CallRecord:
    request: LlmRequest
    response: LlmResponse
    attempt: int
    error: str | None = None


def complete(provider, req: LlmRequest) -> LlmResponse:
    return provider.complete(req)


class Gateway:
    """Front door to the provider for one session.

    ``listener`` is called with a :class:`CallRecord` after every provider
    call, including failed parses, so the recorder can log and charge it.
    """

    def __init__(self, provider, templates=None, *, max_tokens: int = 1024, listener=None):
        self.provider = provider
        self.templates = templates if templates is not None else load_templates()
        self.max_tokens = max_tokens
        self.listener = listener

    def render(self, prompt_id: str, **slots) -> str:
        return self.templates[prompt_id].render(**slots)

    def ask(self, prompt_id: str, parse, images=(), **slots):
        """Render, call, parse. Returns ``(parsed, response)``.

        A reply that fails ``parse`` gets one re-prompt with the error
        appended; a second failure raises :class:`StepError`.
        """
        images = tuple(images)
        if len(images) > MAX_IMAGES:
            raise ValueError(f"at most {MAX_IMAGES} images per request")
        text = self.render(prompt_id, **slots)
        stage = Stage(PROMPTS[prompt_id])
        error = None
        for attempt in range(2):
            prompt = text if error is None else text + REPROMPT.format(error=error)
            req = LlmRequest(stage, prompt, images, max_tokens=self.max_tokens, prompt=prompt_id)
            resp = complete(self.provider, req)
            try:
                parsed = parse(resp.text)
            except ParseFailure as exc:
                error = str(exc)
                self._notify(CallRecord(req, resp, attempt, error))
                continue
            self._notify(CallRecord(req, resp, attempt))
            return parsed, resp
        raise StepError(f"{prompt_id}: reply unusable after a re-prompt: {error}")

    def _notify(self, record: CallRecord):
        if self.listener is not None:
            self.listener(record)
