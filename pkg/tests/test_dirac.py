import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from podles.core import ModelConstants, PodlesElement, cstar_norm, generator, matrix_unit, random_element
from podles.dirac import (
    DerivativeElement,
    d1,
    d1_crosscheck,
    deriv_norm,
    representation_matrix,
    representation_norm,
    seminorm_L,
)
from podles.qsymb import QPolynomial, del1_sym, eval_pi_theta, gen_A, gen_B, gen_Bstar, normal_form, random_poly

QS = [0.3, 0.5, 0.8]


def _single(c, n, k, value):
    out = np.zeros((c.size, c.size + 1), dtype=complex)
    out[n, k] = value
    return DerivativeElement(out, c)


@pytest.mark.parametrize("q", QS)
def test_d1_of_first_matrix_unit(q):
    c = ModelConstants(q, 8)
    xi = d1(matrix_unit(0, 0, c))
    expected = _single(c, 0, 1, q ** -2 / math.sqrt(1 - q * q))
    assert np.allclose(xi.c, expected.c, rtol=1e-13, atol=0)
    assert deriv_norm(xi) == pytest.approx(1 / math.sqrt(1 - q * q), rel=1e-13)


@pytest.mark.parametrize("q", QS)
def test_d1_of_generator_A(q):
    c = ModelConstants(q, 10)
    xi = d1(generator("A", c))
    expected = np.zeros_like(xi.c)
    for k in range(1, c.N + 1):
        expected[k - 1, k] = q ** (-k - 1) * math.sqrt(1 - q ** (2 * k))
    # the truncated A has lambda[N+1, N+1] = 0, so the corner keeps only the
    # raising term and loses the cancellation that produces the pattern above
    N = c.N
    expected[N, N + 1] = q ** (2 * N) * q ** (-3 * (N + 1) + 1) * math.sqrt(1 - q ** (2 * N + 2)) / (1 - q * q)
    assert np.allclose(xi.c, expected, rtol=1e-12, atol=0)
    ks = np.arange(1, c.N + 2)
    assert deriv_norm(xi) == pytest.approx(np.max(q ** (ks - 1) * np.sqrt(1 - q ** (2.0 * ks))), rel=1e-13)


def test_generator_A_norm_example():
    c = ModelConstants(0.5, 16)
    assert deriv_norm(d1(generator("A", c))) == pytest.approx(math.sqrt(0.75), abs=1e-12)
    assert deriv_norm(d1(generator("A", c))) == pytest.approx(cstar_norm(generator("B", c)), abs=1e-12)


def test_d1_of_unit_and_zero():
    c = ModelConstants(0.5, 6)
    assert not np.any(d1(generator("one", c)).c)
    assert deriv_norm(DerivativeElement.zero(c)) == 0
    assert seminorm_L(generator("one", c)) == 0
    assert seminorm_L(matrix_unit(0, 0, c)) == pytest.approx(1 / math.sqrt(0.75), rel=1e-13)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_d1_of_spectral_projection_has_two_coefficients(k):
    q = 0.5
    c = ModelConstants(q, 8)
    xi = d1(matrix_unit(k, k, c))
    nz = sorted(zip(*np.nonzero(xi.c)))
    assert nz == [(k - 1, k), (k, k + 1)]
    # coefficient oracle: the symbolic derivative of chi_k in pi_0, divided by the column weight
    assert xi.c[k, k + 1] == pytest.approx(q ** (-3 * (k + 1) + 1) * math.sqrt(1 - q ** (2 * k + 2)) / (1 - q * q))
    assert xi.c[k - 1, k] == pytest.approx(-(q ** (-3 * k + 1)) * math.sqrt(1 - q ** (2 * k)) / (1 - q * q))


def test_d1_matches_symbolic_derivative_on_words():
    c = ModelConstants(0.5, 10)
    for p in (gen_A(), gen_B(), gen_Bstar(), gen_A() * gen_B(), gen_B() * gen_B() * gen_Bstar(),
              gen_A() ** 3 - gen_B() * gen_Bstar()):
        chk = d1_crosscheck(p, c)
        assert chk.discrepancy <= 1e-12 * max(1.0, chk.scale)


@pytest.mark.parametrize("q", QS)
def test_d1_crosscheck_random(q):
    rng = random.Random(17)
    c = ModelConstants(q, 12)
    for _ in range(15):
        p = random_poly(rng, 4, 6, sphere=True)
        chk = d1_crosscheck(p, c)
        assert chk.discrepancy <= 1e-9 * max(1.0, chk.scale)


def test_weighted_matrix_equals_symbolic_representation():
    # deriv_norm reads sigma_max off the weighted coefficients; check that
    # matrix against the symbolic derivative directly, including column N+1
    c = ModelConstants(0.5, 6)
    p = gen_B() * gen_A()
    sym = eval_pi_theta(del1_sym(p), c.q, 0.0, c.N + 1).matrix
    assert np.allclose(sym[: c.N, :], d1(PodlesElement(0, eval_pi_theta(p, c.q, 0.0, c.N).matrix[:7, :7], c)).weighted()[: c.N, :], atol=1e-13)


@pytest.mark.parametrize("q", QS)
def test_representation_oracle_agrees_with_closed_norm(q):
    c = ModelConstants(q, 8)
    rng = np.random.default_rng(3)
    thetas = np.linspace(0, 2 * np.pi, 7, endpoint=False)
    for _ in range(10):
        xi = DerivativeElement(rng.standard_normal((9, 10)) + 1j * rng.standard_normal((9, 10)), c)
        norms = [representation_norm(xi, t) for t in thetas]
        assert max(norms) - min(norms) <= 1e-10 * max(norms)
        assert norms[0] == pytest.approx(deriv_norm(xi), rel=1e-9)


def test_representation_matrix_of_first_unit_derivative():
    q = 0.5
    c = ModelConstants(q, 6)
    xi = _single(c, 0, 1, 1.0)
    M = representation_matrix(xi, 0.0)
    # f_{0,1}(b*)^2 maps e_1 to a multiple of e_0 and kills everything else
    assert np.count_nonzero(np.abs(M) > 1e-14) == 1
    assert abs(M[0, 1]) == pytest.approx(q ** 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_seminorm_homogeneity_and_star(seed, s):
    c = ModelConstants(0.5, 8)
    x = random_element(c, np.random.default_rng(seed), mu=None)
    assert seminorm_L(s * x) == pytest.approx(abs(s) * seminorm_L(x), rel=1e-12, abs=1e-300)
    assert seminorm_L(x.adjoint()) == seminorm_L(x)
    assert seminorm_L(x + 5) == seminorm_L(x)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_seminorm_leibniz_bound(seed):
    c = ModelConstants(0.5, 8)
    rng = np.random.default_rng(seed)
    # supports well inside the window so the product is not truncated
    x = random_element(c.with_N(3), rng, mu=None).resized(8)
    lam = np.zeros((9, 9), dtype=complex)
    lam[:4, :4] = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    y = PodlesElement(rng.standard_normal(), lam, c)
    lhs = seminorm_L(x * y)
    rhs = seminorm_L(x) * cstar_norm(y) + cstar_norm(x) * seminorm_L(y)
    assert lhs <= rhs + 1e-9


def test_seminorm_kernel():
    c = ModelConstants(0.5, 8)
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = random_element(c, rng, mu=None)
        assert seminorm_L(x) > 1e-6
    x = PodlesElement.scalar(2 - 1j, c)
    assert seminorm_L(x) <= 1e-12
    assert cstar_norm(x - x.psi_inf()) <= 1e-8


def test_derivative_element_json_and_validation():
    c = ModelConstants(0.5, 5)
    rng = np.random.default_rng(8)
    xi = DerivativeElement(rng.standard_normal((6, 7)) + 1j * rng.standard_normal((6, 7)), c)
    back = DerivativeElement.from_json(xi.to_json())
    assert np.array_equal(back.c, xi.c) and back.constants == c
    with pytest.raises(ValueError):
        DerivativeElement(np.zeros((6, 6)), c)
    assert np.array_equal((xi + xi).c, (2 * xi).c)
