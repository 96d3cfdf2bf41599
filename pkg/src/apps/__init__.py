"""Rabbit Hunt Django applications."""
