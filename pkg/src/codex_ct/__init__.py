"""Coded-exposure fly-scan CT: acquisition simulation and ADMM reconstruction."""

__version__ = "0.1.0"
