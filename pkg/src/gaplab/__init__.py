"""Prime-gap laboratory: sieves, gap records, and Erdos-Rankin covering constructions."""

__version__ = "0.1.0"
