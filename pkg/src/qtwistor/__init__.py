"""Exact verification of the q-deformed twistor, instanton and ADHM identities."""

__version__ = "0.1.0"
