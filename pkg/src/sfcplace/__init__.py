"""Reliability-aware SFC placement on heterogeneous fog categories."""

__version__ = "0.1.0"
