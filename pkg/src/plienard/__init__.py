"""Periodic solutions of p(t)-Laplacian Lienard equations."""
