import math

import numpy as np
import pytest

from holonomy_sim import qcore as q


def taylor_expm(a, terms=80):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_hilbert_space_invariants():
    s = q.HilbertSpace(2, 1, ("0", "1", "2"))
    assert s.dim == 3
    assert np.allclose(s.basis("2"), [0, 0, 1])
    with pytest.raises(ValueError):
        q.HilbertSpace(0, 1)
    with pytest.raises(ValueError):
        q.HilbertSpace(2, -1)
    with pytest.raises(ValueError):
        q.HilbertSpace(2, 1, ("a", "a", "b"))
    with pytest.raises(ValueError):
        q.HilbertSpace(2, 1, ("a", "b"))


def test_ket_normalized_and_checks():
    v = q.ket([1, 1j, 0])
    assert abs(np.linalg.norm(v) - 1) < 1e-10
    q.check_state(v)
    with pytest.raises(ValueError):
        q.check_state([1.0, 1.0])
    with pytest.raises(ValueError):
        q.ket([0, 0])


def test_check_density_rejects_bad_matrices():
    q.check_density(q.dm(q.ket([1, 1])))
    with pytest.raises(ValueError):
        q.check_density(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        q.check_density(np.diag([0.5, 0.4]))
    with pytest.raises(ValueError):
        q.check_operator(np.array([[0, 1], [0, 0]]), "hermitian")
    with pytest.raises(ValueError):
        q.check_operator(2 * np.eye(2), "unitary")


def test_expm_zero_exponent_is_identity():
    a = np.random.default_rng(0).normal(size=(4, 4))
    assert np.allclose(q.matrix_exponential(a, 0.0), np.eye(4))


def test_expm_pauli_rotation():
    u = q.matrix_exponential(q.PAULI_X, -1j * math.pi / 2)
    assert np.allclose(u, -1j * q.PAULI_X, atol=1e-14)


def test_expm_diagonal_against_taylor():
    a = np.diag([0.0, 1.0]).astype(complex)
    u = q.matrix_exponential(a, -1j)
    assert np.allclose(u, taylor_expm(-1j * a), atol=1e-14)
    assert abs(u[1, 1] - np.exp(-1j)) < 1e-14


@pytest.mark.parametrize("seed", range(4))
def test_expm_random_against_taylor(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = a + a.conj().T
    for m, s in ((a, 0.3), (h, -0.4j)):
        ref = taylor_expm(s * m)
        got = q.matrix_exponential(m, s)
        assert np.max(np.abs(got - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_expm_rejects_non_finite_and_large():
    with pytest.raises(ValueError):
        q.matrix_exponential(np.array([[np.nan, 0], [0, 0]]))
    with pytest.raises(ValueError):
        q.matrix_exponential(np.eye(26))


def test_expm_hermitian_batch_matches_single():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 4, 4)) + 1j * rng.normal(size=(3, 4, 4))
    h = a + q.dag(a)
    got = q.expm_hermitian_batch(h, 0.7)
    for k in range(3):
        assert np.allclose(got[k], q.matrix_exponential(h[k], -0.7j), atol=1e-13)


def test_tensor_product_examples():
    assert np.allclose(q.tensor_product(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(q.tensor_product(q.PAULI_Z, q.PAULI_Z), np.diag([1, -1, -1, 1]))


def test_tensor_product_index_formula():
    a = q.ladder(5)
    b = np.eye(5)
    k = q.tensor_product(a, b)
    for i in range(5):
        for j in range(5):
            for r in range(5):
                for c in range(5):
                    assert k[i * 5 + r, j * 5 + c] == a[i, j] * b[r, c]
    with pytest.raises(ValueError):
        q.tensor_product(np.eye(26), np.eye(25))


def test_trace_fidelity_examples():
    u = q.matrix_exponential(q.PAULI_Y, -0.3j)
    assert abs(q.trace_fidelity(u, u, 2) - 1) < 1e-15
    assert q.trace_fidelity(np.eye(2), q.PAULI_X, 2) == 0
    g = math.pi / 2
    v = q.matrix_exponential(q.PAULI_Z, 1j * g / 2)
    assert abs(q.trace_fidelity(np.eye(2), v, 2) - abs(math.cos(g / 2))) < 1e-14
    with pytest.raises(ValueError):
        q.trace_fidelity(np.eye(2), np.eye(2), 3)


def test_trace_fidelity_sees_leakage():
    # a swap of |1> and |2> leaves the 2x2 block of U alone at zero overlap
    swap = np.eye(3)[[0, 2, 1]]
    assert abs(q.trace_fidelity(np.eye(3), swap, 2) - 0.5) < 1e-15


def test_phase_alignment():
    u = q.matrix_exponential(q.PAULI_X, -0.9j)
    assert q.phase_distance(np.exp(1.3j) * u, u) < 1e-14


def test_ladder_commutator():
    a = q.ladder(5)
    n = q.dag(a) @ a
    assert np.allclose(n, np.diag(np.arange(5)))
    c = a @ q.dag(a) - q.dag(a) @ a
    assert np.allclose(np.diag(c)[:-1], 1)
