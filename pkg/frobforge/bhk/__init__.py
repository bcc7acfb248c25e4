"""Exact arithmetic for invertible polynomials and their mirrors."""
