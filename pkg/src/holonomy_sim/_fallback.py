"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and in-place semantics; used when the extension is not
built or when ``HOLONOMY_SIM_BACKEND=python`` is set.
"""
import numpy as np


def ordered_product(steps, block, history=None):
    if history is not None:
        history[0] = block
    for k in range(steps.shape[0]):
        block[...] = steps[k] @ block
        if history is not None:
            history[k + 1] = block


def _rhs(r, K, Kdag, jumps, jumps_dag):
    out = -1j * (K @ r - r @ Kdag)
    for J, Jd in zip(jumps, jumps_dag):
        out += J @ r @ Jd
    return out


def lindblad_rk4(rho, K, jumps, h):
    """Dense RK4: ``K`` is (2n+1, d, d), ``jumps`` is (m, d, d)."""
    Kdag = np.conj(np.swapaxes(K, -1, -2))
    jumps_dag = [J.conj().T for J in jumps]
    nsteps = (K.shape[0] - 1) // 2
    for k in range(nsteps):
        a, m, b = 2 * k, 2 * k + 1, 2 * k + 2
        k1 = _rhs(rho, K[a], Kdag[a], jumps, jumps_dag)
        k2 = _rhs(rho + 0.5 * h * k1, K[m], Kdag[m], jumps, jumps_dag)
        k3 = _rhs(rho + 0.5 * h * k2, K[m], Kdag[m], jumps, jumps_dag)
        k4 = _rhs(rho + h * k3, K[b], Kdag[b], jumps, jumps_dag)
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
