"""Genic-interaction extraction pipeline for biomedical abstracts."""

__version__ = "0.1.0"
