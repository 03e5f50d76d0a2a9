"""Exact verification toolkit for nets of quadrics in P^7, their quadric
surface bundles over P^2, the birational charts that relate them and the
intersection lattices of the associated fourfolds."""

__version__ = "0.1.0"
