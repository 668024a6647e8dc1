"""Tracking social-group evolution across time slots of an interaction network."""

__version__ = "0.1.0"
