"""Dynamic taint analysis for prototype-pollution gadgets in MiniJS packages."""

__version__ = "0.1.0"
