"""Symmetric POVMs and the Bloch-vector geometry of qudit states."""

__version__ = "0.1.0"
SCHEMA_VERSION = 1
