"""Verification engine for the quon diagrammatic language over Z_d."""

__version__ = "0.1.0"
