"""Bootstrapped semantic lexicons and multi-label classification of incident narratives."""
__version__ = "0.1.0"
