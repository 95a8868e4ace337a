"""Pauli-correlation-encoded variational pipeline for mRNA structure QUBOs."""

__version__ = "0.1.0"
