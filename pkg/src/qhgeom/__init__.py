"""
Exact computations with quasi-Hopf algebras, their braided closed module
categories, and noncommutative / nonassociative differential geometry on
algebras in those categories.
"""

__version__ = "0.1.0"
