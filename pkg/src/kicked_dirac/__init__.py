"""Spectral Floquet simulation of a delta-kicked Dirac particle in a 1D box."""
__version__ = "0.1.0"
