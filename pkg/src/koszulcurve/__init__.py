"""Exact Koszul cohomology of explicit curve models."""
