"""Equivariant point counts of pointed hyperelliptic curves over finite fields."""

__version__ = "0.1.0"
