"""critspace - critical spaces and critical points of orthogonally invariant varieties."""

__version__ = "0.1.0"
