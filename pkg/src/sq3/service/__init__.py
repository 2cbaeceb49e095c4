"""HTTP service around the orbit/cell computations."""

from .app import app, create_app

__all__ = ["app", "create_app"]
