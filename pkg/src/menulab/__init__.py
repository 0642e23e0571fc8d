"""Experiment engine for a four-agent, four-prize deferred-acceptance lab study."""

__version__ = "0.1.0"
