"""Scenario-based GUI test generation with a multi-agent LLM loop."""

__version__ = "0.1.0"
