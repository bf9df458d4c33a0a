"""HTTP service layer: FastAPI app plus pydantic wire schemas."""

from .app import app, create_app

__all__ = ["app", "create_app"]
