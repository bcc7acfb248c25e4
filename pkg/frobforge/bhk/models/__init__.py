"""Polynomial, weight and group models."""
