"""Regret curve charts from bandit experiment summary CSVs."""

from .render import FigureSpec, RenderError, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "RenderError", "render"]
