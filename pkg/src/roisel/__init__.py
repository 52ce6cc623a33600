"""Tile-based mini video codec with three-level ROI selective encryption
and an ROI-encryption evaluation benchmark."""

__version__ = "0.1.0"
