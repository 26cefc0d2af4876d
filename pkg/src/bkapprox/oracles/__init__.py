"""Benchmark engines: exact-transition Monte Carlo and a trinomial lattice."""
