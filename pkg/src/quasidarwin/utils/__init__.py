"""Logging, serialization, output and concurrency helpers."""
