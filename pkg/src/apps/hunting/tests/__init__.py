"""Tests for the hunting toolkit."""
