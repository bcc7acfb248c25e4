"""Utils for frobforge."""
