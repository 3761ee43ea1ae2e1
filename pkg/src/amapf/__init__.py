"""Anonymous multi-agent path finding for unit-disk agents among polygons."""

__version__ = "0.1.0"
