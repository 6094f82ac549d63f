"""Quantum states over spacetime: QSOT products, interferometric
simulation, tomography and process-matrix comparison."""

__version__ = "0.1.0"
