"""Command-line front end: diagram language, interpretation files and rendering."""
from .interp_file import load as load_interp
from .interp_file import loads as loads_interp
from .language import ParseError, parse, to_text
from .render import to_ascii, to_dot

__all__ = ["ParseError", "load_interp", "loads_interp", "parse", "to_ascii", "to_dot", "to_text"]
