"""Polarizable-embedding VQE-SCF at desk scale."""

__version__ = "0.1.0"
