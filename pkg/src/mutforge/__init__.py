"""mutforge - mutation generation and evaluation against real bugs."""

__version__ = "0.1.0"
