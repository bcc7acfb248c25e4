"""Grid, density and transport plan models."""
