"""HTTP service layer: pydantic schemas, command handlers, FastAPI app."""

from . import handlers
from .app import create_app

__all__ = ["create_app", "handlers"]
