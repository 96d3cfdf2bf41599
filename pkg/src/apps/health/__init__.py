"""Health monitoring app."""
