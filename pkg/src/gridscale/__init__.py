"""gridscale: admittance-matrix power flow with an empirical scaling benchmark."""

__version__ = "0.1.0"
