"""Published benchmark values used for comparison columns and acceptance checks.

All yields and volatility differences are in percent. Keys are
``(r0, b, sigma)`` with rates and volatilities as decimals.
"""

from __future__ import annotations

MEAN_LEVEL = 0.03
BOND_MATURITIES = (1, 2, 5, 10, 20)
SUSPECT_MATURITIES = (20,)  # published rows are half the 10y values
SWAPTION_GRID = (1, 2, 5, 10)
RECEIVER_MONEYNESS = (0.70, 0.80, 0.90, 1.00)
PAYER_MONEYNESS = (1.00, 1.10, 1.25, 1.50)

# (mc, a2) yields per maturity
BOND_YIELDS = {
    (0.01, 0.10, 0.25): {1: (1.071, 1.071), 2: (1.142, 1.142), 5: (1.350, 1.350), 10: (1.663, 1.663), 20: (0.832, 0.832)},
    (0.03, 0.10, 0.25): {1: (3.043, 3.043), 2: (3.080, 3.080), 5: (3.159, 3.159), 10: (3.221, 3.222), 20: (1.610, 1.611)},
    (0.06, 0.10, 0.25): {1: (5.885, 5.885), 2: (5.769, 5.769), 5: (5.435, 5.436), 10: (4.971, 4.975), 20: (2.485, 2.487)},
    (0.01, 0.02, 0.25): {1: (1.027, 1.027), 2: (1.053, 1.053), 5: (1.134, 1.134), 10: (1.264, 1.264), 20: (0.632, 0.632)},
    (0.03, 0.02, 0.25): {1: (3.046, 3.046), 2: (3.089, 3.089), 5: (3.203, 3.203), 10: (3.331, 3.333), 20: (1.666, 1.666)},
    (0.06, 0.02, 0.25): {1: (6.048, 6.048), 2: (6.086, 6.086), 5: (6.145, 6.146), 10: (6.075, 6.081), 20: (3.038, 3.041)},
    (0.01, 0.10, 0.50): {1: (1.120, 1.120), 2: (1.243, 1.243), 5: (1.607, 1.607), 10: (2.104, 2.107), 20: (1.052, 1.053)},
    (0.03, 0.10, 0.50): {1: (3.178, 3.178), 2: (3.336, 3.336), 5: (3.668, 3.670), 10: (3.872, 3.882), 20: (1.936, 1.941)},
    (0.06, 0.10, 0.50): {1: (6.137, 6.137), 2: (6.215, 6.216), 5: (6.174, 6.181), 10: (5.747, 5.774), 20: (2.874, 2.887)},
}

SWAPTION_PARAMS = tuple(BOND_YIELDS)

# expiry == tenor: (forward swap rate, receiver errors at 70..100%, payer errors at 100..150%)
MONEYNESS_ERRORS = {
    (0.01, 0.10, 0.25): {
        1: (1.22, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        2: (1.43, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        5: (1.99, (0.00, 0.00, 0.01, 0.01), (0.01, 0.01, 0.00, 0.00)),
        10: (2.60, (-0.01, 0.00, 0.01, 0.01), (0.02, 0.02, 0.01, 0.00)),
    },
    (0.03, 0.10, 0.25): {
        1: (3.17, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        2: (3.25, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        5: (3.34, (-0.01, 0.00, 0.01, 0.01), (0.02, 0.02, 0.01, -0.01)),
        10: (3.31, (-0.01, 0.00, 0.00, 0.00), (0.03, 0.03, 0.02, 0.01)),
    },
    (0.06, 0.10, 0.25): {
        1: (5.82, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        2: (5.46, (-0.01, 0.00, 0.00, 0.00), (0.01, 0.01, 0.00, 0.00)),
        5: (4.62, (-0.01, 0.00, 0.01, 0.01), (0.03, 0.02, 0.01, 0.00)),
        10: (3.86, (-0.01, -0.01, -0.01, -0.01), (0.03, 0.03, 0.03, 0.02)),
    },
    (0.01, 0.02, 0.25): {
        1: (1.09, (0.00, 0.00, -0.01, -0.01), (0.00, 0.00, 0.00, 0.00)),
        2: (1.17, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        5: (1.40, (0.01, 0.02, 0.02, 0.01), (0.02, 0.01, 0.00, -0.01)),
        10: (1.72, (0.11, 0.12, 0.11, 0.10), (0.12, 0.09, 0.05, -0.01)),
    },
    (0.03, 0.02, 0.25): {
        1: (3.18, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        2: (3.30, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        5: (3.52, (0.03, 0.05, 0.05, 0.04), (0.06, 0.05, 0.02, -0.02)),
        10: (3.51, (0.01, 0.02, 0.02, 0.02), (0.07, 0.06, 0.06, 0.05)),
    },
    (0.06, 0.02, 0.25): {
        1: (6.32, (0.00, 0.00, 0.00, 0.00), (0.00, 0.00, 0.00, 0.00)),
        2: (6.38, (0.00, 0.00, 0.01, 0.01), (0.01, 0.01, 0.00, -0.01)),
        5: (6.20, (0.01, 0.03, 0.03, 0.03), (0.06, 0.05, 0.04, 0.01)),
        10: (5.34, (-0.07, -0.13, -0.17, -0.18), (-0.13, -0.12, -0.10, -0.02)),
    },
    (0.01, 0.10, 0.50): {
        1: (1.38, (-0.02, -0.03, -0.04, -0.03), (-0.02, -0.01, 0.00, 0.02)),
        2: (1.75, (-0.02, -0.02, -0.02, -0.01), (-0.01, -0.01, 0.00, 0.01)),
        5: (2.63, (0.23, 0.23, 0.21, 0.17), (0.23, 0.18, 0.10, -0.02)),
        10: (3.26, (0.04, 0.08, 0.09, 0.07), (0.27, 0.25, 0.21, 0.14)),
    },
    (0.03, 0.10, 0.50): {
        1: (3.55, (0.00, -0.01, -0.01, -0.01), (0.00, 0.00, 0.00, 0.01)),
        2: (3.90, (0.07, 0.08, 0.07, 0.06), (0.08, 0.06, 0.02, -0.03)),
        5: (4.16, (0.23, 0.26, 0.25, 0.22), (0.32, 0.27, 0.20, 0.07)),
        10: (3.93, (-0.06, -0.06, -0.07, -0.08), (0.16, 0.15, 0.16, 0.18)),
    },
    (0.06, 0.10, 0.50): {
        1: (6.49, (0.01, 0.02, 0.02, 0.01), (0.03, 0.02, 0.01, -0.01)),
        2: (6.43, (0.12, 0.15, 0.14, 0.12), (0.15, 0.12, 0.06, -0.03)),
        5: (5.49, (0.10, 0.13, 0.13, 0.12), (0.27, 0.25, 0.21, 0.15)),
        10: (4.38, (-0.10, -0.17, -0.22, -0.24), (0.01, 0.01, 0.04, 0.13)),
    },
}

# rows: expiry 1, 2, 5, 10; columns: tenor 1, 2, 5, 10.
# Published as "payer" errors; the values coincide with receiver-side errors.
ATM_ERRORS = {
    (0.01, 0.10, 0.25): ((0.00, 0.00, 0.00, -0.01), (0.00, 0.00, 0.00, -0.01), (0.00, 0.00, 0.01, 0.00), (0.01, 0.02, 0.01, 0.01)),
    (0.03, 0.10, 0.25): ((0.00, 0.00, -0.01, -0.03), (0.00, 0.00, 0.00, -0.02), (0.01, 0.01, 0.01, 0.00), (0.02, 0.02, 0.01, 0.00)),
    (0.06, 0.10, 0.25): ((0.00, 0.00, -0.02, -0.06), (0.00, 0.00, -0.01, -0.04), (0.02, 0.02, 0.01, -0.01), (0.02, 0.02, 0.01, -0.01)),
    (0.01, 0.02, 0.25): ((-0.01, 0.00, -0.01, -0.02), (-0.01, 0.00, -0.01, 0.00), (-0.01, 0.00, 0.01, 0.02), (0.03, 0.05, 0.09, 0.10)),
    (0.03, 0.02, 0.25): ((0.00, 0.00, -0.01, -0.04), (0.00, 0.00, 0.00, -0.02), (0.02, 0.03, 0.04, 0.02), (0.14, 0.15, 0.12, 0.02)),
    (0.06, 0.02, 0.25): ((0.00, 0.00, -0.02, -0.08), (0.00, 0.01, 0.00, -0.05), (0.05, 0.06, 0.03, -0.04), (0.11, 0.08, -0.05, -0.18)),
    (0.01, 0.10, 0.50): ((-0.03, -0.02, -0.01, -0.13), (-0.05, -0.01, 0.01, -0.07), (0.06, 0.14, 0.17, 0.04), (0.46, 0.49, 0.32, 0.07)),
    (0.03, 0.10, 0.50): ((-0.01, 0.01, -0.02, -0.20), (0.02, 0.06, 0.04, -0.10), (0.31, 0.35, 0.22, 0.01), (0.58, 0.49, 0.15, -0.08)),
    (0.06, 0.10, 0.50): ((0.01, 0.02, -0.05, -0.33), (0.09, 0.12, 0.03, -0.18), (0.45, 0.40, 0.12, -0.10), (0.46, 0.29, -0.10, -0.24)),
}

# Payer minus receiver ATM implied vol; same layout as ATM_ERRORS.
PARITY_DISPARITY = {
    (0.01, 0.10, 0.25): ((0.00, 0.00, 0.01, 0.02), (0.00, 0.00, 0.01, 0.02), (0.00, 0.00, 0.00, 0.02), (0.00, 0.00, 0.01, 0.02)),
    (0.03, 0.10, 0.25): ((0.00, 0.00, 0.02, 0.08), (0.00, 0.00, 0.02, 0.06), (0.00, 0.00, 0.01, 0.04), (0.00, 0.00, 0.01, 0.03)),
    (0.06, 0.10, 0.25): ((0.00, 0.01, 0.05, 0.18), (0.00, 0.01, 0.04, 0.12), (0.00, 0.00, 0.02, 0.07), (0.00, 0.00, 0.01, 0.04)),
    (0.01, 0.02, 0.25): ((0.01, -0.01, 0.01, 0.04), (0.00, 0.00, 0.01, 0.03), (0.00, 0.00, 0.00, 0.02), (0.00, 0.00, 0.00, 0.02)),
    (0.03, 0.02, 0.25): ((0.00, 0.00, 0.03, 0.11), (0.00, 0.00, 0.02, 0.08), (0.00, 0.00, 0.02, 0.06), (-0.01, -0.01, 0.01, 0.05)),
    (0.06, 0.02, 0.25): ((0.00, 0.01, 0.06, 0.22), (0.00, 0.01, 0.04, 0.16), (0.00, 0.00, 0.03, 0.10), (-0.01, -0.01, 0.01, 0.06)),
    (0.01, 0.10, 0.50): ((0.01, 0.01, 0.06, 0.35), (0.00, 0.00, 0.06, 0.28), (-0.01, 0.00, 0.06, 0.25), (-0.15, -0.10, 0.01, 0.19)),
    (0.03, 0.10, 0.50): ((0.00, 0.02, 0.15, 0.66), (0.01, 0.02, 0.13, 0.52), (-0.03, -0.01, 0.10, 0.38), (-0.16, -0.09, 0.02, 0.23)),
    (0.06, 0.10, 0.50): ((0.01, 0.05, 0.29, 1.10), (0.01, 0.04, 0.23, 0.81), (-0.04, 0.00, 0.15, 0.49), (-0.14, -0.08, 0.02, 0.25)),
}

# Comparison of yield errors vs MC at r0=6%, sigma=85%; only the A2 column is recomputed.
COMPARISON_MATURITIES = (0.1, 0.5, 1, 2, 3)
COMPARISON_R0 = 0.06
COMPARISON_SIGMA = 0.85
COMPARISON_PRINTED_B = "ln(0.04)"
COMPARISON_MEAN_LEVEL = 0.04
COMPARISON_COLUMNS = ("small_vol_expansion", "exponent_expansion_1", "exponent_expansion_2", "exponent_expansion_3", "a2_published")
COMPARISON_ERRORS = {
    0.1: (-0.10, 0.00, 0.00, 0.00, -0.02),
    0.5: (-0.23, 0.02, 0.02, 0.02, -0.01),
    1: (-0.46, 0.01, 0.00, 0.00, -0.07),
    2: (-0.90, 0.06, 0.03, 0.00, -0.13),
    3: (-1.24, 0.17, 0.10, 0.00, -0.08),
}
