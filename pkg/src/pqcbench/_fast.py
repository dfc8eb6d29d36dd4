"""Optional numba-accelerated gate kernels.

One jitted routine covers every supported gate: a gate is a 2x2 matrix
applied to a set of (index0, index1) amplitude pairs per instance, with
per-instance matrix entries.  A serial variant handles the common small
batches (thread fork/join costs more than the arithmetic there); the
parallel variant takes over for large sampling batches.  Falls back
silently when numba is absent or ``PQCBENCH_NO_NUMBA`` is set; the numpy
kernels in ``sim`` are the reference semantics either way.
"""

from __future__ import annotations

import os

_serial = None
_parallel = None
PARALLEL_MIN_BATCH = 50_000

if not os.environ.get("PQCBENCH_NO_NUMBA"):
    try:
        import numba

        _SIG = ("void(complex128[:, ::1], int64[::1], int64[::1], "
                "complex128[::1], complex128[::1], complex128[::1], "
                "complex128[::1])")

        def _body(amps, i0s, i1s, m00, m01, m10, m11):  # pragma: no cover
            n_pairs = i0s.size
            for m in range(amps.shape[0]):
                a00 = m00[m]
                a01 = m01[m]
                a10 = m10[m]
                a11 = m11[m]
                for k in range(n_pairs):
                    i0 = i0s[k]
                    i1 = i1s[k]
                    x0 = amps[m, i0]
                    x1 = amps[m, i1]
                    amps[m, i0] = a00 * x0 + a01 * x1
                    amps[m, i1] = a10 * x0 + a11 * x1

        def _body_par(amps, i0s, i1s, m00, m01, m10, m11):  # pragma: no cover
            n_pairs = i0s.size
            for m in numba.prange(amps.shape[0]):
                a00 = m00[m]
                a01 = m01[m]
                a10 = m10[m]
                a11 = m11[m]
                for k in range(n_pairs):
                    i0 = i0s[k]
                    i1 = i1s[k]
                    x0 = amps[m, i0]
                    x1 = amps[m, i1]
                    amps[m, i0] = a00 * x0 + a01 * x1
                    amps[m, i1] = a10 * x0 + a11 * x1

        _serial = numba.njit(_SIG, cache=True)(_body)
        _parallel = numba.njit(_SIG, parallel=True, cache=True)(_body_par)
    except ImportError:  # pragma: no cover
        _serial = _parallel = None

HAVE_FAST = _serial is not None


def apply_pairs(amps, i0s, i1s, m00, m01, m10, m11) -> None:
    if amps.shape[0] >= PARALLEL_MIN_BATCH:
        _parallel(amps, i0s, i1s, m00, m01, m10, m11)
    else:
        _serial(amps, i0s, i1s, m00, m01, m10, m11)
