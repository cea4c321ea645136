"""Turn-constrained path planning with regular chains of segments."""

__version__ = "1.0.0"
