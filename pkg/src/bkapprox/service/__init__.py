"""HTTP service exposing table runs, pricing and calibration."""
