"""Exact and certified evaluation of generalized totient floor-sums."""
