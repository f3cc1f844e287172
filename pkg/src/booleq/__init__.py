"""Exact combinatorics of Boolean easy quantum semigroups."""
