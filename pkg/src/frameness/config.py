"""Global numerical tolerance shared by every module.

The zero-weight / feasibility tolerance defaults to 1e-9 and may be overridden
through the ``FRAMENESS_TOL`` environment variable or :func:`set_tolerance`
(the CLI's ``--tol`` flag calls the latter).  Spectra are set-valued and every
convertibility theorem is spectrum-sensitive, so all modules must agree on a
single threshold.
"""

from __future__ import annotations

import os

DEFAULT_TOL = 1e-9

_tol = float(os.environ.get("FRAMENESS_TOL", DEFAULT_TOL))


def tolerance() -> float:
    """Current global tolerance."""
    return _tol


def set_tolerance(value: float) -> None:
    if value <= 0:
        raise ValueError(f"tolerance must be positive, got {value}")
    global _tol
    _tol = float(value)
