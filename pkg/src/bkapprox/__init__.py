"""Semi-analytic bond and swaption prices in the Black-Karasinski short-rate model.

The log short rate deviation is expanded in Karhunen-Loeve modes; the leading
mode is integrated by Gauss-Hermite quadrature. Monte Carlo and trinomial
lattice oracles serve as benchmarks.
"""

__version__ = "0.1.0"

from .bonds import BondQuote, bond_price_fast, bond_price_full, yield_from_price
from .model import ModelParams, load_model, save_model
from .swaptions import (
    SwaptionSpec,
    black_swaption_price,
    forward_swap_rate,
    implied_vol,
    parity_disparity,
    swaption_price,
)

__all__ = [
    "BondQuote",
    "ModelParams",
    "SwaptionSpec",
    "black_swaption_price",
    "bond_price_fast",
    "bond_price_full",
    "forward_swap_rate",
    "implied_vol",
    "load_model",
    "parity_disparity",
    "save_model",
    "swaption_price",
    "yield_from_price",
]
