"""Toy causal transformer with a pluggable normalizer."""
