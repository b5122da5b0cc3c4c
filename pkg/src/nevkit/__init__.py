"""Numerical Nevanlinna theory for shifts and difference polynomials.

Modules: :mod:`~nevkit.funcat` (function catalog), :mod:`~nevkit.nevanlinna`
(proximity, counting, characteristic and the shift-quotient bound),
:mod:`~nevkit.diffpoly` (difference polynomials and their checks) and
:mod:`~nevkit.harness` (experiment suites and CSV reports).
"""

from .diffpoly import DiffPoly, parse, render
from .funcat import evaluate, parse_function
from .nevanlinna import characteristic, lemma_bound, proximity

__version__ = "0.1.0"

__all__ = ["DiffPoly", "characteristic", "evaluate", "lemma_bound", "parse", "parse_function",
           "proximity", "render"]
