"""Numerical laboratory for closed surfaces of revolution satisfying the
spectral curvature condition lambda_1(-Delta + beta*K) >= lambda >= 0."""

__version__ = "0.1.0"
