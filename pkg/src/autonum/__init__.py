"""Decide first-order statements about automatic sequences and count their solutions.

Formulas over base-k tuples compile to automata; counting automata become
linear representations over the rationals, which are minimized, compared
and analysed exactly.
"""

__version__ = "0.1.0"
