"""clozeforge: structure-based cloze question generation and QA analysis."""

__version__ = "0.1.0"
