import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from podles.core import (
    ConstantsMismatch,
    ModelConstants,
    PodlesElement,
    QState,
    cstar_norm,
    from_qpoly,
    generator,
    matrix_unit,
    psi_infinity,
    random_element,
    state_eval,
    vector_state,
)
from podles.qsymb import NotInSphereError, QPolynomial, eval_pi_theta, gen_A, gen_B, indicator_poly, normal_form

C8 = ModelConstants(0.5, 8)


def test_constants_validation():
    with pytest.raises(ValueError, match="q out of range"):
        ModelConstants(1.5, 8)
    with pytest.raises(ValueError, match="q out of range"):
        ModelConstants(0.99, 8)
    assert ModelConstants(0.99, 8, q_max=0.999).q == 0.99
    with pytest.raises(ValueError):
        ModelConstants(0.5, -1)
    assert ModelConstants(0.5, 8) == ModelConstants(0.5, 8, q_max=0.9)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
def test_normalizing_constants(q):
    c = ModelConstants(q, 10)
    Bm = eval_pi_theta(gen_B(), q, 0.0, 40).matrix
    for n in range(11):
        assert c.C(n, n) == 1.0
        for k in range(11):
            assert c.C(n, k) == c.C(k, n) > 0
            # oracle: ||B^(n-k) e_k||^2 in the representation
            if n >= k:
                v = np.linalg.matrix_power(Bm, n - k)[:, k]
                assert c.C(n, k) == pytest.approx(np.vdot(v, v).real, rel=1e-12)
    for n in range(1, 10):
        for k in range(n, 10):
            assert c.C(n, k) / c.C(n, k + 1) == pytest.approx(1 / (q ** (2 * k) * (1 - q ** (2 * (k + 1)))), rel=1e-12)
            assert c.C(n, k) / c.C(n - 1, k) == pytest.approx(1 / (q ** (2 * (n - 1)) * (1 - q ** (2 * n))), rel=1e-12)
    assert c.w(3) == q ** 6


def test_matrix_units():
    f = lambda n, k: matrix_unit(n, k, C8)
    assert (f(0, 1) * f(1, 2)).allclose(f(0, 2), atol=0)
    assert (f(0, 1) * f(0, 1)).allclose(PodlesElement.zero(C8), atol=0)
    assert f(2, 5).adjoint().allclose(f(5, 2), atol=0)
    assert f(0, 0).allclose(generator("chi", C8, 0), atol=0)
    with pytest.raises(IndexError):
        matrix_unit(9, 0, C8)


def test_first_matrix_unit_is_spectral_projection():
    # f_00 is the projection onto the top eigenvector of A
    ev, vecs = np.linalg.eigh(generator("A", C8).matrix())
    top = vecs[:, -1]
    assert np.allclose(np.abs(np.outer(top, top.conj())), matrix_unit(0, 0, C8).lam, atol=1e-14)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
def test_generator_norms_and_tails(q):
    c = ModelConstants(q, 12)
    Ap, Bp = generator("A", c), generator("B", c)
    assert cstar_norm(Ap) == pytest.approx(1.0)
    ks = np.arange(1, 200)
    assert cstar_norm(Bp) == pytest.approx(np.max(q ** (ks - 1) * np.sqrt(1 - q ** (2.0 * ks))), rel=1e-14)
    assert Ap.tail == q ** 26
    big = generator("B", c.with_N(60)).lam
    assert Bp.tail == pytest.approx(np.linalg.norm(big[13:, 12:], 2), rel=1e-12)
    assert generator("Bstar", c).allclose(Bp.adjoint(), atol=0)
    one = generator("one", c)
    assert cstar_norm(one) == 1 and one.psi_inf() == 1


def test_generator_B_norm_example():
    assert cstar_norm(generator("B", ModelConstants(0.5, 20))) == pytest.approx(math.sqrt(0.75), abs=1e-12)


def test_sphere_relations_in_the_model():
    c = ModelConstants(0.6, 12)
    Ap, Bp, Bs = generator("A", c), generator("B", c), generator("Bstar", c)
    assert np.max(np.abs((Ap * Bp - c.q ** 2 * (Bp * Ap)).lam)) <= 1e-13
    lhs = (Bp * Bs).lam - (Ap * (1 - Ap)).lam / c.q ** 2
    assert np.max(np.abs(lhs[:-1, :-1])) <= 1e-13
    lhs = (Bs * Bp).lam - (Ap * (1 - c.q ** 2 * Ap)).lam
    assert np.max(np.abs(lhs[:-1, :-1])) <= 1e-13
    x = random_element(c, np.random.default_rng(0), mu=None)
    assert (x * generator("one", c)).allclose(x, atol=0)


def test_spectral_projections_shift_under_Bstar():
    c = ModelConstants(0.5, 10)
    Bs = generator("Bstar", c)
    for k in range(c.N):
        lhs = matrix_unit(k, k, c) * Bs
        rhs = Bs * matrix_unit(k + 1, k + 1, c)
        assert lhs.allclose(rhs, atol=1e-15)


def test_cstar_norm_examples():
    assert cstar_norm(PodlesElement.scalar(1, C8)) == 1
    assert cstar_norm(matrix_unit(0, 0, C8) - 1) == pytest.approx(1)
    assert cstar_norm(PodlesElement.scalar(-3j, C8)) == pytest.approx(3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cstar_identities(seed):
    rng = np.random.default_rng(seed)
    x, y = random_element(C8, rng, mu=None), random_element(C8, rng, mu=None)
    assert cstar_norm(x * y) <= cstar_norm(x) * cstar_norm(y) * (1 + 1e-12)
    assert cstar_norm(x.adjoint() * x) == pytest.approx(cstar_norm(x) ** 2, rel=1e-10)
    assert cstar_norm(x.adjoint()) == pytest.approx(cstar_norm(x), rel=1e-12)


def test_fiber_isometry():
    rng = np.random.default_rng(4)
    for k in range(C8.size):
        v = rng.standard_normal(C8.size) + 1j * rng.standard_normal(C8.size)
        lam = np.zeros((C8.size, C8.size), dtype=complex)
        lam[:, k] = v
        assert cstar_norm(PodlesElement(0, lam, C8)) == pytest.approx(np.linalg.norm(v), rel=1e-12)


def test_algebra_errors_and_scalars():
    other = ModelConstants(0.5, 7)
    with pytest.raises(ConstantsMismatch):
        matrix_unit(0, 0, C8) + matrix_unit(0, 0, other)
    with pytest.raises(ValueError):
        PodlesElement(0, np.zeros((3, 3)), C8)
    x = random_element(C8, np.random.default_rng(2), mu=None)
    assert (2 * x).allclose(x + x, atol=1e-14)
    assert (x - x).allclose(PodlesElement.zero(C8), atol=0)
    assert (1 + x).mu == x.mu + 1


def test_states():
    Ap = generator("A", C8)
    assert state_eval(psi_infinity(C8), Ap) == 0
    assert state_eval(vector_state(0, C8), Ap) == pytest.approx(1)
    one = generator("one", C8)
    for k in range(C8.size):
        assert state_eval(vector_state(k, C8), one) == pytest.approx(1)
        assert state_eval(vector_state(k, C8), Ap) == pytest.approx(C8.q ** (2 * k))
    rng = np.random.default_rng(5)
    M = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    rho = M @ M.conj().T
    s = QState(0.3, rho / np.trace(rho).real)
    for _ in range(10):
        x = random_element(C8, rng, mu=None)
        assert state_eval(s, x.adjoint() * x).real >= -1e-12
        assert abs(state_eval(s, x.adjoint() * x).imag) <= 1e-10
    with pytest.raises(ConstantsMismatch):
        state_eval(vector_state(0, ModelConstants(0.5, 4)), Ap)


@pytest.mark.parametrize("t, rho", [
    (1.5, np.eye(2) / 2),
    (0.0, np.eye(2)),
    (0.0, np.array([[1, 1], [0, 0]])),
    (0.0, np.diag([1.5, -0.5])),
])
def test_state_validation(t, rho):
    with pytest.raises(ValueError):
        QState(t, rho)


def test_state_resize():
    s = vector_state(2, C8)
    assert s.resized(4).N == 4 and s.resized(12).rho[2, 2] == 1
    with pytest.raises(ValueError):
        vector_state(7, C8).resized(4)


def test_json_round_trip_is_bit_exact():
    rng = np.random.default_rng(9)
    x = random_element(C8, rng, mu=None)
    y = PodlesElement.from_json(x.to_json())
    assert y.mu == x.mu and np.array_equal(y.lam, x.lam) and y.constants == x.constants
    M = rng.standard_normal((9, 9))
    rho = M @ M.T
    s = QState(0.25, rho / np.trace(rho))
    s2 = QState.from_json(s.to_json())
    assert s2.t == s.t and np.array_equal(s2.rho, s.rho)


def test_from_qpoly():
    c = ModelConstants(0.5, 10)
    assert from_qpoly(gen_B(), c).allclose(generator("B", c), atol=1e-15)
    assert from_qpoly(QPolynomial.scalar(1), c).allclose(generator("one", c), atol=0)
    x = from_qpoly(gen_A() ** 40, c)
    assert x.allclose(matrix_unit(0, 0, c), atol=1e-11)
    with pytest.raises(NotInSphereError):
        from_qpoly(normal_form(["a"]), c)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_indicator_partial_sums_converge_to_matrix_units(k):
    c = ModelConstants(0.5, 8)
    errs = [np.max(np.abs(from_qpoly(indicator_poly(k, n), c).matrix() - matrix_unit(k, k, c).matrix()))
            for n in (2, 4, 6, 8)]
    # error shrinks like q^(2n) while float cancellation stays below it
    assert errs[0] > errs[1] > errs[2] > errs[3]
    assert errs[-1] < 3e-5


def test_indicator_poly_is_nonzero_above_ground_state():
    assert len(indicator_poly(2, 3)) > 0
    with pytest.raises(ValueError):
        indicator_poly(0, 0)
