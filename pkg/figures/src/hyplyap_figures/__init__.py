"""Render the standard experiment figures from hyplyap CSV outputs.

This package never recomputes any science: every plotted number comes
straight out of the CSV, which must follow the column schemas the
hyplyap CLI documents.  Rendering is deterministic (fixed axes, Agg
backend, no timestamps), so regenerating a figure from the same CSV is
byte-identical.
"""

from .figures import FigureSpec, SchemaMismatch, make_figures

__all__ = ["FigureSpec", "SchemaMismatch", "make_figures"]
