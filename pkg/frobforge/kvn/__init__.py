"""Koopman-von Neumann phase-space dynamics and the density fibration."""
