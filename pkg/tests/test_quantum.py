import numpy as np
import pytest

from lindblad_learn.errors import InvalidDimensionError
from lindblad_learn.quantum import (
    density_matrix, expectation, haar_random_pure, kron, ladder, min_eigenvalue, pauli, purity,
)

from conftest import random_density, random_hermitian


def comm(a, b):
    return a @ b - b @ a


def test_pauli_z_is_diagonal():
    np.testing.assert_array_equal(pauli("Z"), np.diag([1, -1]))


def test_pauli_algebra():
    X, Y, Z, P, M = (pauli(w) for w in ("X", "Y", "Z", "Plus", "Minus"))
    I = np.eye(2)
    assert np.max(np.abs(M @ P + P @ M - I)) <= 1e-14
    assert np.max(np.abs(comm(X, Y) - 2j * Z)) <= 1e-14
    assert np.max(np.abs(comm(Y, Z) - 2j * X)) <= 1e-14
    assert np.max(np.abs(comm(Z, X) - 2j * Y)) <= 1e-14
    np.testing.assert_allclose(P, (X + 1j * Y) / 2, atol=1e-15)
    np.testing.assert_allclose(M, (X - 1j * Y) / 2, atol=1e-15)


def test_sigma_minus_moves_index0_to_index1():
    rho = np.diag([1.0, 0.0]).astype(complex)
    M = pauli("Minus")
    np.testing.assert_allclose(M @ rho @ M.conj().T, np.diag([0.0, 1.0]))


def test_unknown_pauli():
    with pytest.raises(ValueError):
        pauli("W")


def test_ladder_number():
    np.testing.assert_array_equal(ladder(3, "number"), np.diag([0, 1, 2]))


def test_ladder_lower_on_fock_2():
    ket2 = np.zeros(4)
    ket2[2] = 1
    expected = np.zeros(4)
    expected[1] = np.sqrt(2)
    np.testing.assert_allclose(ladder(4, "lower") @ ket2, expected, atol=1e-15)


@pytest.mark.parametrize("n_max", [2, 3, 7, 21])
def test_truncated_commutator_defect(n_max):
    a, ad = ladder(n_max, "lower"), ladder(n_max, "raise")
    c = comm(a, ad)
    expected = np.eye(n_max)
    expected[-1, -1] = -(n_max - 1)  # aa^dag loses the top level, a^dag a keeps it
    assert np.max(np.abs(c - expected)) <= 1e-14
    np.testing.assert_allclose(ad @ a, ladder(n_max, "number"), atol=1e-14)
    np.testing.assert_array_equal(ad, a.conj().T)


def test_ladder_invalid_dimension():
    with pytest.raises(InvalidDimensionError):
        ladder(1, "lower")


def test_kron_identities():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    zi = kron(pauli("Z"), np.eye(2))
    assert zi[0, 0] == 1 and zi[3, 3] == -1


def test_kron_matches_index_formula(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    out = kron(a, b)
    db = b.shape[0]
    brute = np.zeros((12, 12), dtype=complex)
    for i in range(3):
        for j in range(3):
            for k in range(4):
                for l in range(4):
                    brute[i * db + k, j * db + l] = a[i, j] * b[k, l]
    np.testing.assert_allclose(out, brute, rtol=0, atol=1e-14)


def test_expectation_examples():
    ket0 = np.array([1, 0], dtype=complex)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    assert expectation(density_matrix(ket0), pauli("Z")) == pytest.approx(1.0, abs=1e-15)
    assert expectation(np.eye(2) / 2, pauli("X")) == pytest.approx(0.0, abs=1e-15)
    assert expectation(density_matrix(plus), pauli("X")) == pytest.approx(1.0, abs=1e-15)


def test_expectation_errors():
    with pytest.raises(InvalidDimensionError):
        expectation(np.eye(2) / 2, np.eye(4))
    with pytest.raises(ValueError):
        expectation(np.eye(2) / 2, pauli("Plus"))


def test_expectation_is_linear(rng):
    for _ in range(20):
        rho = random_density(4, rng)
        A, B = random_hermitian(4, rng), random_hermitian(4, rng)
        a, b = rng.normal(size=2)
        lhs = expectation(rho, a * A + b * B)
        assert lhs == pytest.approx(a * expectation(rho, A) + b * expectation(rho, B), abs=1e-12)


def test_haar_states_are_normalized_and_pure(rng):
    for dim in (2, 3, 8):
        for _ in range(50):
            psi = haar_random_pure(dim, rng)
            assert abs(np.linalg.norm(psi) - 1) <= 1e-12
            assert purity(density_matrix(psi)) == pytest.approx(1.0, abs=1e-12)


def test_haar_sigma_z_mean_vanishes():
    rng = np.random.default_rng(7)
    z = pauli("Z")
    vals = [expectation(density_matrix(haar_random_pure(2, rng)), z) for _ in range(100_000)]
    assert abs(np.mean(vals)) < 0.01


def test_haar_is_reproducible():
    a = haar_random_pure(5, np.random.default_rng(99))
    b = haar_random_pure(5, np.random.default_rng(99))
    assert a.tobytes() == b.tobytes()


def test_haar_rejects_dim_one(rng):
    with pytest.raises(InvalidDimensionError):
        haar_random_pure(1, rng)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        density_matrix(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    rho = density_matrix(np.diag([0.25, 0.75]))
    assert min_eigenvalue(rho) == pytest.approx(0.25)
    assert not rho.flags.writeable
