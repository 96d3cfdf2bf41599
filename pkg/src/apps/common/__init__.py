"""Shared helpers for Rabbit Hunt apps."""
