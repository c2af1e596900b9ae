"""File-emitting figures for the riskwaves batch CSV outputs."""

from .figures import FigureRequest, SchemaError, render

__all__ = ["FigureRequest", "SchemaError", "render"]
__version__ = "0.1.0"
