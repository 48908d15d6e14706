"""HTTP service exposing assessments, statuses, mappings, and resolution."""

from trustnet.api.app import AppConfig, create_app

__all__ = ["AppConfig", "create_app"]
