"""Exception hierarchy shared across the engine."""


class EngineError(Exception):
    """Base class for every error raised by the engine."""


class ScenarioError(EngineError, ValueError):
    """Invalid scenario definition."""


class ConfigError(EngineError, ValueError):
    """Invalid engine or CLI configuration."""


class OcrError(EngineError):
    """The OCR engine failed to produce a result."""


class TemplateError(EngineError, KeyError):
    """A prompt template could not be rendered."""

    def __str__(self):
        return Exception.__str__(self)


class LlmError(EngineError):
    """Provider-level failure. Aborts the current step."""

    retriable = True


class LlmTimeout(LlmError):
    pass


class ScriptExhausted(LlmError):
    """Scripted provider ran out of entries or the next entry has the wrong stage."""


class ParseFailure(EngineError, ValueError):
    """A model reply did not follow the response contract."""


class StepError(EngineError):
    """A decision step failed after the allowed re-prompt."""


class DeviceError(EngineError):
    """Backend unreachable or a device command failed."""


class ExecutionError(DeviceError):
    def __init__(self, message, sub_action_index):
        super().__init__(f"sub-action {sub_action_index}: {message}")
        self.sub_action_index = sub_action_index


class SimSpecError(EngineError, ValueError):
    """Malformed simulated-app definition."""


class RecorderError(EngineError):
    """Session log could not be written; the session must abort."""
