"""em_memory package."""

__version__ = "0.1.0"

from .main import main  # noqa: E402  re-export for convenience

__all__ = ["__version__", "main"]
