"""Monge-Ampere solving and discrete optimal transport."""
