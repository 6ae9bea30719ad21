"""Tests for StatDEC."""
