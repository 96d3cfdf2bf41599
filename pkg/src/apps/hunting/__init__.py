"""Invisible rabbit hunting toolkit."""
