"""Figure regeneration from oscflux CSV outputs.

Strictly a consumer of the documented CSV schemas: every physics number is
read from file, nothing is recomputed here, and rendering is deterministic
(identical bytes for identical inputs).
"""

from .render import FigureError, FigureSpec, render

__version__ = "0.1.0"
__all__ = ["FigureSpec", "FigureError", "render"]
