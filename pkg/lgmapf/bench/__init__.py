"""Benchmark harness: validation, metrics, result files and the matrix runner."""
