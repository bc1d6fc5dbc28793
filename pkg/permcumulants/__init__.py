"""Exact and Monte-Carlo cumulants of Ewens random permutations."""
