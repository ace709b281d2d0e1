"""Laplacian positional encodings, diffusion geometry and node identification on random regular graphs."""

__version__ = "0.1.0"
