"""Prompt templates shipped as editable text files, one per prompt id.

Placeholders use ``$name`` syntax so the JSON examples inside templates need
no escaping. Every placeholder present in a template is required.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from string import Template

from ..errors import TemplateError

_SLOT = re.compile(r"\$(?:(\w+)|\{(\w+)\})")

# Prompt id -> ledger stage. The first six are the stage templates; the rest are
# variants charged to the stage they belong to.
PROMPTS = {
    "logical_decision": "logical_decision",
    "widget_localization": "widget_localization",
    "loading_check": "loading_check",
    "transition_check": "transition_check",
    "completion_check": "completion_check",
    "self_correction": "self_correction",
    "widget_prediction": "widget_localization",
    "location_adjustment": "widget_localization",
    "change_check": "transition_check",
}


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    text: str

    @property
    def slots(self) -> frozenset[str]:
        return frozenset(a or b for a, b in _SLOT.findall(self.text.replace("$$", "")))

    def render(self, **values) -> str:
        missing = self.slots - {k for k, v in values.items() if v is not None}
        if missing:
            raise TemplateError(f"template {self.id!r} is missing slots: {', '.join(sorted(missing))}")
        return Template(self.text).substitute({k: str(v) for k, v in values.items()})


def load_templates(directory=None) -> dict[str, PromptTemplate]:
    """Load every known prompt; a user directory overrides the packaged files one by one."""
    out = {}
    pkg = resources.files("guiscenario.llm") / "templates"
    for pid in PROMPTS:
        path = Path(directory) / f"{pid}.txt" if directory else None
        if path is not None and path.exists():
            text = path.read_text()
        else:
            text = (pkg / f"{pid}.txt").read_text()
        out[pid] = PromptTemplate(pid, text)
    return out
