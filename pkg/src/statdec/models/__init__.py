"""Pydantic models for configuration, manifests and reports."""
