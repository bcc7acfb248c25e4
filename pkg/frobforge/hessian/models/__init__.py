"""Tensor and field models for Hessian geometry."""
