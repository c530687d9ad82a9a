# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled inner loops for propagation.

Two kernels live here:

ordered_product
    Left-multiplies a stack of step propagators onto a state block.
lindblad_rk4
    Fixed-step RK4 for a batch of Hermitian density matrices.  The effective
    Hamiltonian and the jump operators arrive in coordinate (COO) form so
    that the sparse 25-level two-transmon models cost O(nnz * d) per
    product instead of O(d^3).

Both mirror ``holonomy_sim._fallback`` exactly; the selection happens in
``holonomy_sim.kernels``.
"""
import numpy as np

ctypedef double complex cplx


def ordered_product(const cplx[:, :, ::1] steps, cplx[:, ::1] block,
                    cplx[:, :, ::1] history=None):
    """In place: ``block <- steps[n-1] @ ... @ steps[0] @ block``.

    If ``history`` is given (shape ``(n + 1, d, m)``) every partial product
    is written to it, starting with the input block.
    """
    cdef Py_ssize_t n = steps.shape[0]
    cdef Py_ssize_t d = block.shape[0]
    cdef Py_ssize_t m = block.shape[1]
    cdef Py_ssize_t k, i, j, l
    cdef cplx acc
    cdef cplx[:, ::1] tmp = np.empty((d, m), dtype=np.complex128)
    cdef bint keep = history is not None

    with nogil:
        if keep:
            for i in range(d):
                for j in range(m):
                    history[0, i, j] = block[i, j]
        for k in range(n):
            for i in range(d):
                for j in range(m):
                    acc = 0
                    for l in range(d):
                        acc = acc + steps[k, i, l] * block[l, j]
                    tmp[i, j] = acc
            for i in range(d):
                for j in range(m):
                    block[i, j] = tmp[i, j]
                    if keep:
                        history[k + 1, i, j] = tmp[i, j]


cdef void _rhs(const cplx[:, :, ::1] r, cplx[:, :, ::1] out,
               const int[::1] kr, const int[::1] kc,
               const cplx[:, ::1] ka, Py_ssize_t s,
               const int[::1] jptr, const int[::1] jr, const int[::1] jc,
               const cplx[::1] jv, const cplx[::1] jvc,
               cplx[:, ::1] x, cplx[:, ::1] tmp) noexcept nogil:
    # For Hermitian r:  -i (K r - r K^dag) = X + X^dag with X = -i K r,
    # and J r J^dag = J (J r)^dag.  All sparse products then run along rows.
    # ka holds the values of -i*K at sample s.
    cdef Py_ssize_t nb = r.shape[0]
    cdef Py_ssize_t d = r.shape[1]
    cdef Py_ssize_t nk = kr.shape[0]
    cdef Py_ssize_t nj = jptr.shape[0] - 1
    cdef Py_ssize_t b, n, c, i, j, q
    cdef cplx a

    for b in range(nb):
        for i in range(d):
            for c in range(d):
                x[i, c] = 0
                out[b, i, c] = 0
        for n in range(nk):
            i = kr[n]
            j = kc[n]
            a = ka[s, n]
            for c in range(d):
                x[i, c] = x[i, c] + a * r[b, j, c]
        for q in range(nj):
            for i in range(d):
                for c in range(d):
                    tmp[i, c] = 0
            for n in range(jptr[q], jptr[q + 1]):
                i = jr[n]
                j = jc[n]
                a = jv[n]
                for c in range(d):
                    tmp[i, c] = tmp[i, c] + a * r[b, j, c]
            # out[i, c] += sum_j J[i, j] conj(tmp[c, j])
            for n in range(jptr[q], jptr[q + 1]):
                i = jr[n]
                j = jc[n]
                a = jv[n]
                for c in range(d):
                    out[b, i, c] = out[b, i, c] + a * tmp[c, j].conjugate()
        for i in range(d):
            for c in range(d):
                out[b, i, c] = out[b, i, c] + x[i, c] + x[c, i].conjugate()


def lindblad_rk4(cplx[:, :, ::1] rho,
                 const int[::1] kr, const int[::1] kc,
                 const cplx[:, ::1] ka,
                 const int[::1] jptr, const int[::1] jr, const int[::1] jc,
                 const cplx[::1] jv, const cplx[::1] jvc,
                 double h):
    """Advance ``rho`` (batch, d, d) in place by ``(ka.shape[0] - 1) // 2`` steps.

    Sample ``2k`` is the start of step ``k``, ``2k + 1`` its midpoint and
    ``2k + 2`` its end.
    """
    cdef Py_ssize_t nsteps = (ka.shape[0] - 1) // 2
    cdef Py_ssize_t nb = rho.shape[0]
    cdef Py_ssize_t d = rho.shape[1]
    cdef Py_ssize_t k, b, i, c
    cdef double h2 = 0.5 * h
    cdef double h6 = h / 6.0
    cdef cplx[:, :, ::1] k1 = np.empty((nb, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] k2 = np.empty((nb, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] k3 = np.empty((nb, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] k4 = np.empty((nb, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] y = np.empty((nb, d, d), dtype=np.complex128)
    cdef cplx[:, ::1] tmp = np.empty((d, d), dtype=np.complex128)
    cdef cplx[:, ::1] x = np.empty((d, d), dtype=np.complex128)

    with nogil:
        for k in range(nsteps):
            _rhs(rho, k1, kr, kc, ka, 2 * k, jptr, jr, jc, jv, jvc, x, tmp)
            for b in range(nb):
                for i in range(d):
                    for c in range(d):
                        y[b, i, c] = rho[b, i, c] + h2 * k1[b, i, c]
            _rhs(y, k2, kr, kc, ka, 2 * k + 1, jptr, jr, jc, jv, jvc, x, tmp)
            for b in range(nb):
                for i in range(d):
                    for c in range(d):
                        y[b, i, c] = rho[b, i, c] + h2 * k2[b, i, c]
            _rhs(y, k3, kr, kc, ka, 2 * k + 1, jptr, jr, jc, jv, jvc, x, tmp)
            for b in range(nb):
                for i in range(d):
                    for c in range(d):
                        y[b, i, c] = rho[b, i, c] + h * k3[b, i, c]
            _rhs(y, k4, kr, kc, ka, 2 * k + 2, jptr, jr, jc, jv, jvc, x, tmp)
            for b in range(nb):
                for i in range(d):
                    for c in range(d):
                        rho[b, i, c] = rho[b, i, c] + h6 * (
                            k1[b, i, c] + 2.0 * k2[b, i, c] + 2.0 * k3[b, i, c] + k4[b, i, c])
