"""Spatio-temporal logic workbench: satisfiability, model checking,
translations and benchmark generators for spatial logics over
Aleksandrov spaces and their temporal combinations."""

__version__ = "0.1.0"
