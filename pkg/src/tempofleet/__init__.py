"""Correct-by-construction planning and control for multi-robot object transport under LTL tasks."""

__version__ = "0.1.0"
