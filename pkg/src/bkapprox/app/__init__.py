"""Table reproduction, single-instrument pricing, calibration and the command line."""
