"""Byte-level seq2seq trainer and inference service for sample files."""

__version__ = "0.1.0"
