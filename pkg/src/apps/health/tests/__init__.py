"""Test package for health app."""
