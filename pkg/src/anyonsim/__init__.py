"""Simulation toolkit for non-Abelian anyons and Majorana zero modes."""

__version__ = "0.1.0"
