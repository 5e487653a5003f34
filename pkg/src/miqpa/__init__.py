"""Exact epsilon-approximation of bounded indefinite mixed integer quadratic programs."""
