"""Cone point models."""
