"""Symmetric cones, their log-det geometry and the Lorentz cone."""
