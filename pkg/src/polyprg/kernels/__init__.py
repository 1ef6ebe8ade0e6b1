"""Hot enumeration kernels with a numba fast path and a numpy fallback.

Backend selection: the environment variable POLYPRG_BACKEND may be set to
"numba", "numpy", or "auto" (default).  Under "auto" the numba kernels are
used when numba imports cleanly, otherwise the numpy fallback.  Both
backends implement identical contracts; integer-weight counts are
bit-identical across them, floating-point sums agree to rounding.

Point encoding: cube points are indexed by integers; bit j of the index
set means u_j = +1.  The integer-weight cube kernels walk the cube in
Gray-code order with incremental dot-product updates (exact in int64);
the float-weight kernels recompute each dot from scratch to avoid
accumulated drift.

Seed-space kernels enumerate the output of the generator through its
GF(2)-linear structure: for a fixed hash segment the map from the
remaining seed bits to the output sign pattern is linear, so it is handed
to the kernel as a base pattern plus one flip mask per seed bit (bit t of
the rest counter toggles masks[t]).  The lab probes and verifies that
structure against the reference generator before calling in.
"""

from __future__ import annotations

import os

from . import _numpy as numpy_backend

_numba_backend = None
_numba_error: Exception | None = None


def _load_numba():
    global _numba_backend, _numba_error
    if _numba_backend is None and _numba_error is None:
        try:
            from . import _numba as mod

            _numba_backend = mod
        except Exception as exc:  # pragma: no cover - environment dependent
            _numba_error = exc
    return _numba_backend


def backend_name() -> str:
    choice = os.environ.get("POLYPRG_BACKEND", "auto").lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"POLYPRG_BACKEND must be auto/numba/numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if _load_numba() is None:
            raise ImportError(f"numba backend unavailable: {_numba_error}")
        return "numba"
    return "numba" if _load_numba() is not None else "numpy"


def get_backend():
    """The active kernel module (resolved per call, so env changes apply)."""
    if backend_name() == "numba":
        return _numba_backend
    return numpy_backend


def cube_orthant_counts(A, thresholds, lo, hi):
    """Counts of cube points with A.u <= t for each threshold row t."""
    return get_backend().cube_orthant_counts(A, thresholds, lo, hi)


def cube_mollifier_sum(A, b, lam, lo, hi):
    """Sum over cube points of the mollified orthant value at A.u."""
    return get_backend().cube_mollifier_sum(A, b, lam, lo, hi)


def linear_seed_orthant_counts(base_bits, masks, A, thresholds, lo, hi):
    """Counts of rest-seeds in [lo, hi) whose output lands under each threshold."""
    return get_backend().linear_seed_orthant_counts(
        base_bits, masks, A, thresholds, lo, hi
    )


def linear_seed_mollifier_sum(base_bits, masks, A, b, lam, lo, hi):
    """Sum of mollified orthant values over the outputs of a seed range."""
    return get_backend().linear_seed_mollifier_sum(
        base_bits, masks, A, b, lam, lo, hi
    )


def cube_max_defect(A, b, b_in, b_out, lam, big_lambda, lo, hi):
    """Worst approximator defect outside the excluded strips, over cube points."""
    return get_backend().cube_max_defect(A, b, b_in, b_out, lam, big_lambda, lo, hi)


def linear_seed_max_defect(base_bits, masks, A, b, b_in, b_out, lam, big_lambda, lo, hi):
    """Worst approximator defect outside the excluded strips, over seed outputs."""
    return get_backend().linear_seed_max_defect(
        base_bits, masks, A, b, b_in, b_out, lam, big_lambda, lo, hi
    )
