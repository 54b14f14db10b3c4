"""FastAPI service wrapping the scoring engine for long-running use."""

from .app import EngineRuntime, create_app, create_app_from_env

__all__ = ["EngineRuntime", "create_app", "create_app_from_env"]
