"""Numerical toolkit for curvature operators, boundary spectra and
prescribed-curvature solvers on radial and flat model geometries."""

__version__ = "0.1.0"
