"""Hessian potentials, pre-Frobenius tensors and their residuals."""
