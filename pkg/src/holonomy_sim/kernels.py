"""Backend selection for the propagation hot loops.

The compiled Cython module is used when importable; otherwise the numpy
fallback.  ``HOLONOMY_SIM_BACKEND=python`` forces the fallback, which the
benchmark and the cross-backend tests rely on.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback

try:
    from . import _kernels as _ext
except ImportError:  # extension not built
    _ext = None

BACKENDS = ("cython", "python") if _ext is not None else ("python",)
# above this dimension numpy's BLAS matmul beats the compiled scalar loop
PRODUCT_MAX_DIM = 8


def default_backend() -> str:
    forced = os.environ.get("HOLONOMY_SIM_BACKEND", "").strip().lower()
    if forced == "python" or _ext is None:
        return "python"
    return "cython"


def _resolve(backend):
    backend = backend or default_backend()
    if backend not in ("cython", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "cython" and _ext is None:
        raise RuntimeError("compiled kernels are not available in this install")
    return backend


def ordered_product(steps, block, *, history=False, backend=None):
    """Return ``steps[n-1] @ ... @ steps[0] @ block``.

    With ``history=True`` returns the stack of all ``n + 1`` partial products.
    The input ``block`` is not modified.  Without an explicit ``backend``,
    dimensions above ``PRODUCT_MAX_DIM`` use the numpy path.
    """
    steps = np.ascontiguousarray(steps, dtype=np.complex128)
    out = np.array(block, dtype=np.complex128, order="C", copy=True)
    squeeze = out.ndim == 1
    if squeeze:
        out = out[:, None]
    hist = np.empty((steps.shape[0] + 1,) + out.shape, dtype=np.complex128) if history else None
    if backend is None and steps.shape[-1] > PRODUCT_MAX_DIM:
        backend = "python"
    if _resolve(backend) == "cython":
        _ext.ordered_product(steps, out, hist)
    else:
        _fallback.ordered_product(steps, out, hist)
    if history:
        return hist[..., 0] if squeeze else hist
    return out[:, 0] if squeeze else out


def _coo(mats, tol=0.0):
    mask = np.any(np.abs(mats) > tol, axis=0)
    rows, cols = np.nonzero(mask)
    return rows.astype(np.intc), cols.astype(np.intc)


def lindblad_rk4(rho, K, jumps, h, *, backend=None):
    """RK4-advance a batch of density matrices in place.

    ``K`` holds the non-Hermitian effective Hamiltonian
    ``H - (i/2) sum J^dag J`` at the ``2n + 1`` start/mid/end samples of ``n``
    steps; ``jumps`` are the collapse operators with their rates folded in.
    The compiled path assumes Hermitian ``rho``, which the equation preserves.
    """
    if _resolve(backend) == "python":
        _fallback.lindblad_rk4(rho, K, jumps, h)
        return rho
    K = np.ascontiguousarray(K, dtype=np.complex128)
    kr, kc = _coo(K)
    ka = np.ascontiguousarray(-1j * K[:, kr, kc])
    jptr = [0]
    jr, jc, jv = [], [], []
    for J in jumps:
        r, c = np.nonzero(J)
        jr.append(r)
        jc.append(c)
        jv.append(J[r, c])
        jptr.append(jptr[-1] + len(r))
    jr = np.ascontiguousarray(np.concatenate(jr) if jr else np.zeros(0), dtype=np.intc)
    jc = np.ascontiguousarray(np.concatenate(jc) if jc else np.zeros(0), dtype=np.intc)
    jv = np.ascontiguousarray(np.concatenate(jv) if jv else np.zeros(0), dtype=np.complex128)
    _ext.lindblad_rk4(rho, kr, kc, ka, np.asarray(jptr, dtype=np.intc), jr, jc, jv,
                      np.ascontiguousarray(np.conj(jv)), float(h))
    return rho
