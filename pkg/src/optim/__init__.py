"""Gradient-free optimizers."""
