"""
Proximal-Gradient Flow Package
Inertial prox-gradient dynamics for nonsmooth nonconvex composite objectives
"""

__version__ = "1.0.0"
