"""HTTP service and the shared handler layer behind it."""

from .app import create_app

__all__ = ["create_app"]
