"""Prerequisite-aware skills pre-assessment and recommendation engine."""

__version__ = "0.1.0"
