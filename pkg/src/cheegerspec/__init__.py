"""Sturm-Liouville upper bounds on Laplacian eigenvalues in terms of the Cheeger constant."""

__version__ = "0.1.0"
