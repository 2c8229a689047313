"""Adelic slope arithmetic and explicit lower bounds for linear forms in
logarithms of algebraic numbers.

Layers, bottom up: exact number fields and their places (``fields``,
``places``), p-adic exp/log (``padics``), Weil heights (``heights``), adelic
hermitian bundles with degree/slope arithmetic (``bundles``, ``sympower``),
Siegel-lemma bounds and twisted norms (``siegel``), overflow-free log-scale
reals (``logscale``), the explicit bound machinery (``bounds``), and
end-to-end verification of linear-form instances (``linforms``, ``cli``).
"""

from .balls import PrecisionContext, RealBall, ComplexBall
from .fields import NumberField, FieldElement, RATIONALS, GAUSSIANS, parse_field, parse_element
from .places import Place, PPower, enumerate_places, abs_value, product_formula_residual
from .padics import PadicNumber, padic_exp, padic_log
from .heights import HeightReport, weil_height, vector_height, height_scaling_check
from .bundles import AdelicBundle, liouville_check

__all__ = [
    "PrecisionContext", "RealBall", "ComplexBall",
    "NumberField", "FieldElement", "RATIONALS", "GAUSSIANS",
    "parse_field", "parse_element",
    "Place", "PPower", "enumerate_places", "abs_value", "product_formula_residual",
    "PadicNumber", "padic_exp", "padic_log",
    "HeightReport", "weil_height", "vector_height", "height_scaling_check",
    "AdelicBundle", "liouville_check",
]

__version__ = "0.1.0"
