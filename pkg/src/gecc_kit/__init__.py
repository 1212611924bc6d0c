"""Exact engine for graded, enriched characteristic cycles.

Builds conormal and relative conormal cycles from a Whitney-stratified
descriptor, computes relative polar curves, nearby- and vanishing-cycle
cycles, and point Morse modules, all in exact rational arithmetic.
"""

__version__ = "0.1.0"
