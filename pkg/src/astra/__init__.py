"""Retrieval and structure augmented code generation for C++ sources."""

__version__ = "0.1.0"
