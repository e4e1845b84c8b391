"""Extremal spatial dependence: copula closed forms, empirical estimators and reference simulations."""

__version__ = "1.0.0"
