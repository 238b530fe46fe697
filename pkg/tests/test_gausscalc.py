"""Closed-form Gaussian calculus: evaluation, shifts, operator action."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metaplectic.errors import ValidationError
from metaplectic.gausscalc import (GaussianState, apply_matrix, apply_token,
                                   apply_word, check_intertwining,
                                   complex_shift, conjugate_state, eval_state,
                                   gaussian_integral, inner_product, norm,
                                   shift, standard_gaussian, wigner_gaussian)
from metaplectic.sympcore import (atom_r, chirp, fourier, random_word, rescale,
                                  tilde_word, word_to_matrix)

from conftest import random_state, rel_values


def test_standard_gaussian_norm():
    # ||exp(-pi x.x)||_2 = 2^{-d/4}
    assert abs(norm(standard_gaussian(1)) - 2.0 ** -0.25) < 1e-14
    assert abs(norm(standard_gaussian(3)) - 2.0 ** -0.75) < 1e-14


def test_gaussian_integral_principal_branch():
    val = gaussian_integral(np.array([[1.0 - 1.0j]]), np.zeros(1))
    assert abs(val - (0.77688698701501865 + 0.32179712645279131j)) < 1e-15


def test_gaussian_integral_matches_quadrature():
    M = np.array([[1.4, 0.3], [0.3, 0.9]]) + 1j * np.array([[0.2, 0.0], [0.0, -0.4]])
    z = np.array([0.1 + 0.2j, -0.3])
    val = gaussian_integral(M, z)
    xs = np.linspace(-9, 9, 1201)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    P = np.stack([X, Y], axis=-1)
    quad = (M[0, 0] * X**2 + 2 * M[0, 1] * X * Y + M[1, 1] * Y**2)
    integrand = np.exp(-np.pi * quad - 2j * np.pi * (z[0] * X + z[1] * Y))
    approx = np.trapezoid(np.trapezoid(integrand, xs, axis=1), xs)
    assert abs(val - approx) < 1e-10 * abs(val)


def test_eval_state_formula():
    f = GaussianState(1, 0.7 + 0.2j, [[0.2 + 0.8j]], [0.3 - 0.2j])
    x = np.array([0.45])
    want = f.c * np.exp(1j * np.pi * (0.2 + 0.8j) * x[0] ** 2
                        + 2j * np.pi * (0.3 - 0.2j) * x[0])
    assert abs(eval_state(f, x) - want) < 1e-15


def test_conjugate_state_values(rng):
    f = random_state(rng, 2)
    x = rng.normal(size=(5, 2))
    assert rel_values(eval_state(conjugate_state(f), x),
                      np.conj(eval_state(f, x))) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_shift_composition(seed):
    rng = np.random.default_rng(seed)
    f = random_state(rng, 1)
    z1, z2 = rng.normal(size=2), rng.normal(size=2)
    t1, t2 = rng.normal(), rng.normal()
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    lhs = shift(shift(f, z2, t2), z1, t1)
    rhs = shift(f, z1 + z2, t1 + t2 - 0.5 * float(z1 @ J @ z2))
    x = rng.normal(size=(7, 1))
    assert rel_values(eval_state(lhs, x), eval_state(rhs, x)) < 1e-12


def test_complex_shift_extends_real_shift(rng):
    f = random_state(rng, 2)
    z = rng.normal(size=4)
    x = rng.normal(size=(6, 2))
    a = shift(f, z, 0.3)
    b = complex_shift(f, z[:2].astype(complex), z[2:].astype(complex), 0.3)
    assert rel_values(eval_state(a, x), eval_state(b, x)) < 1e-13


def test_fourier_fourth_power_is_parity_sign():
    for d in (1, 2):
        f = random_state(np.random.default_rng(d), d)
        g = apply_word([fourier(d)] * 4, f)
        x = np.random.default_rng(99).normal(size=(6, d))
        assert rel_values(eval_state(g, x),
                          (-1.0) ** d * eval_state(f, x)) < 1e-12


def test_fourier_inverse_word():
    # the inverse transform equals the parity flip followed by the transform,
    # so flip . F . F is the identity operator
    d = 2
    f = random_state(np.random.default_rng(5), d)
    g = apply_word([rescale(-np.eye(d), maslov=d), fourier(d), fourier(d)], f)
    x = np.random.default_rng(6).normal(size=(6, d))
    assert rel_values(eval_state(g, x), eval_state(f, x)) < 1e-12


def test_hermite_semigroup_on_gaussian_family():
    # R_theta maps exp(-pi a x.x) to (cosh t + a sinh t)^{-1/2} exp(-pi b x.x)
    # with b the Moebius image (a + tanh t)/(1 + a tanh t)
    for a, th in ((1.0, 0.7), (0.4, 1.3), (2.5, 0.2)):
        f = GaussianState(1, 1.0, [[1j * a]], [0.0])
        g = apply_token(atom_r([th]), f)
        b = (a + np.tanh(th)) / (1 + a * np.tanh(th))
        amp = (np.cosh(th) + a * np.sinh(th)) ** -0.5
        want = GaussianState(1, amp, [[1j * b]], [0.0])
        x = np.linspace(-1.5, 1.5, 9)[:, None]
        assert rel_values(eval_state(g, x), eval_state(want, x)) < 1e-12


def test_hermite_semigroup_fixes_ground_state():
    th = 0.9
    f = standard_gaussian(1)
    g = apply_token(atom_r([th]), f)
    x = np.linspace(-1, 1, 7)[:, None]
    assert rel_values(eval_state(g, x),
                      np.exp(-th / 2) * eval_state(f, x)) < 1e-13


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_apply_matrix_matches_word(seed, d):
    rng = np.random.default_rng(seed)
    word = random_word(rng, d, max_len=6)
    f = random_state(rng, d)
    g1 = apply_word(word, f)
    g2 = apply_matrix(word_to_matrix(word), f)
    x = rng.normal(size=(8, d))
    # the token route accumulates each factor's phase while the matrix route
    # takes the principal determinant branch: equal up to one unimodular
    # constant, identical across evaluation points
    v1, v2 = eval_state(g1, x), eval_state(g2, x)
    k = int(np.argmax(np.abs(v2)))
    s = v1[k] / v2[k]
    assert abs(abs(s) - 1.0) < 1e-9
    assert rel_values(v1, s * v2) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_apply_preserves_siegel_domain(seed, d):
    rng = np.random.default_rng(seed)
    word = random_word(rng, d, max_len=6)
    g = apply_word(word, random_state(rng, d))
    w = np.linalg.eigvalsh(np.asarray(g.Q).imag)
    assert w[0] > 0


def test_apply_matrix_rejects_dimension_mismatch(rng):
    with pytest.raises(ValidationError):
        apply_matrix(np.eye(4), random_state(rng, 1))


def test_inner_product_conjugate_symmetry(rng):
    f, g = random_state(rng, 2), random_state(rng, 2)
    assert abs(inner_product(f, g) - np.conj(inner_product(g, f))) < 1e-12


def test_inner_product_matches_quadrature(rng):
    f, g = random_state(rng, 1), random_state(rng, 1)
    xs = np.linspace(-8, 8, 4001)[:, None]
    vals = eval_state(f, xs) * np.conj(eval_state(g, xs))
    assert abs(inner_product(f, g) - np.trapezoid(vals, xs[:, 0])) < 1e-10


def test_wigner_of_ground_state():
    W = wigner_gaussian(standard_gaussian(1))
    assert abs(W.c - np.sqrt(2)) < 1e-13
    assert np.allclose(W.Q, 2j * np.eye(2), atol=1e-13)
    assert np.allclose(W.b, 0, atol=1e-13)


def test_wigner_moyal_identity(rng):
    for _ in range(10):
        d = int(rng.integers(1, 3))
        f, g = random_state(rng, d), random_state(rng, d)
        W = wigner_gaussian(f, g)
        assert abs(norm(W) - norm(f) * norm(g)) < 1e-10 * norm(f) * norm(g)


def test_wigner_diagonal_is_real(rng):
    f = random_state(rng, 1)
    W = wigner_gaussian(f)
    z = rng.normal(size=(9, 2))
    vals = eval_state(W, z)
    assert np.max(np.abs(vals.imag)) < 1e-12 * np.max(np.abs(vals))


def test_short_time_transform_reference_value():
    # V_w f(x, xi) = exp(-i pi x xi) <f, shift(w, (x, xi))> pinned at one point
    phi = standard_gaussian(1)
    x, xi = 0.3, 0.7
    val = np.exp(-1j * np.pi * x * xi) * inner_product(phi, shift(phi, [x, xi]))
    assert abs(val - (0.22466124380554834 - 0.17426512374688566j)) < 1e-15


def test_intertwining_on_sums(rng):
    for _ in range(8):
        d = int(rng.integers(1, 3))
        word = random_word(rng, d, max_len=5)
        f = [random_state(rng, d), random_state(rng, d)]
        z = rng.normal(size=2 * d)
        tau = rng.normal()
        assert check_intertwining(word, z, tau, f) < 1e-10
