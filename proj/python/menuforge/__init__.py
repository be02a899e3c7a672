"""Optimal unit-demand menus for a buyer with uniform values on a rectangle.

Thin Python wrapper over the C++ core. All heavy lifting happens in
``_menuforge``; this module parses its JSON payloads into dicts.
"""

import json as _json

from . import _menuforge as _core

__all__ = [
    "solve",
    "solve_rect",
    "verify",
    "dual_certificate",
    "certify",
    "certify_check_ids",
    "oracle_compare",
    "revenue",
]


def solve(c, b1, b2=1.0):
    """Solve the symmetric support [c, c+b1] x [c, c+b2].

    Returns a dict with the regime label, menu, exclusion region,
    solved parameters, and expected revenue.
    """
    return _json.loads(_core.solve_json(c, b1, b2))


def solve_rect(c1, c2, b1, b2):
    """Solve an asymmetric support (rectangle-exclusion regime only)."""
    return _json.loads(_core.solve_rect_json(c1, c2, b1, b2))


def verify(c, b1, b2=1.0, tol=1e-7):
    """Interval-by-interval optimality certificate for the solved menu."""
    return _json.loads(_core.verify_json(c, b1, b2, tol))


def dual_certificate(example):
    """Strong-duality transport certificate for worked example 1, 2, or 3."""
    return _json.loads(_core.dual_json(example))


def certify(check_id, grid=50, workers=0, tol=1e-9):
    """Numeric grid sweep re-verifying one closed-form inequality claim."""
    return _json.loads(_core.certify_json(check_id, grid, workers, tol))


def certify_check_ids():
    """All known inequality-sweep check ids."""
    return list(_core.certify_check_ids())


def oracle_compare(c, b1, b2=1.0, allocation_grid=0.05, price_grid=0.02):
    """Brute-force menu search compared against the analytic solution."""
    return _json.loads(_core.oracle_json(c, b1, b2, allocation_grid, price_grid))


def revenue(c, b1, b2=1.0):
    """Optimal expected revenue on the symmetric support."""
    return _core.revenue(c, b1, b2)
