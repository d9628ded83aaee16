"""Rook placements, Stirling numbers and Poisson approximation of block and cycle spectra."""
