"""Numerical companion for a GL(3) x GL(2) subconvexity argument in the
weight aspect: exact exponent bookkeeping plus checkable versions of every
analytic ingredient."""

__version__ = "0.1.0"
