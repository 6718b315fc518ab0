"""
Domain types: quadrature rules, disorder, the TAP state and the coin-tossing measure.
"""

from rslab.models.quadrature import QuadratureRule, TensorRule
from rslab.models.inner_product import NormalizedInnerProduct
from rslab.models.disorder import Disorder
from rslab.models.tap_state import TapState, RankOneFactors
from rslab.models.coin_tossing import PFreeMeasure, log_two_cosh

__all__ = [
    "QuadratureRule",
    "TensorRule",
    "NormalizedInnerProduct",
    "Disorder",
    "TapState",
    "RankOneFactors",
    "PFreeMeasure",
    "log_two_cosh",
]
