"""Experiment harness: datasets, PSO training runs, metrics and reports."""
