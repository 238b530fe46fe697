"""Closed-form action of generator words on Gaussian states.

A *Gaussian state* is

    f(x) = c * exp(i pi Q x . x + 2 pi i b . x)

with ``Q`` complex symmetric, ``Im Q`` positive definite (or semidefinite
when explicitly allowed, e.g. for phase-space symbols), ``b`` a complex
vector and ``c`` a complex amplitude.  Finite lists of states ("Gaussian
sums") are closed under every operation here, and every operation is exact
in the parameters: the only floating-point error is that of the matrix
algebra itself.  This makes the module the reference oracle for the sampled
grid representation.

Conventions fixed once:

* the Fourier generator is ``i^{-d/2}`` times the classical transform
  (integral kernel ``exp(-2 pi i x . xi)``);
* square roots of determinants are taken eigenvalue-by-eigenvalue on the
  principal branch, which matches the continuous branch tracking of the
  metaplectic phase for every word built from the generator tokens;
* the Wigner distribution uses the *classical* partial Fourier transform,
  so that ``W(f, f)`` is real for every ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DecompositionError, UnsupportedDegenerate, ValidationError
from .sympcore import (
    Token,
    blocks,
    chirp,
    factor_R_theta,
    fourier,
    rescale,
    word_dim,
    word_to_matrix,
)

__all__ = [
    "GaussianState",
    "standard_gaussian",
    "conjugate_state",
    "eval_state",
    "eval",
    "gaussian_integral",
    "shift",
    "complex_shift",
    "apply_token",
    "apply_word",
    "apply_matrix",
    "inner_product",
    "norm",
    "wigner_gaussian",
    "check_intertwining",
]


@dataclass(frozen=True)
class GaussianState:
    """Parameters of ``c exp(i pi Q x.x + 2 pi i b.x)`` on R^d."""

    d: int
    c: complex
    Q: np.ndarray
    b: np.ndarray
    allow_degenerate: bool = False

    def __post_init__(self):
        d = int(self.d)
        Q = np.atleast_2d(np.asarray(self.Q, dtype=complex))
        b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        if Q.shape != (d, d) or b.shape != (d,):
            raise ValidationError(f"state shape mismatch: d={d}, Q {Q.shape}, b {b.shape}")
        if np.linalg.norm(Q - Q.T) > 1e-10 * max(1.0, np.linalg.norm(Q)):
            raise ValidationError("Q must be symmetric")
        Q = (Q + Q.T) / 2
        w = np.linalg.eigvalsh(Q.imag)
        scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
        if self.allow_degenerate:
            if w[0] < -1e-9 * scale:
                raise ValidationError("Im Q must be positive semidefinite")
        elif w[0] <= 1e-14 * scale:
            raise ValidationError("Im Q must be positive definite (decaying state)")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "b", b)


def standard_gaussian(d):
    """The unit-amplitude Gaussian ``exp(-pi |x|^2)`` (Q = iI, b = 0, c = 1)."""
    return GaussianState(d, 1.0, 1j * np.eye(d), np.zeros(d))


def conjugate_state(f):
    """State of ``conj(f)``: ``Q -> -conj Q``, ``b -> -conj b``, ``c -> conj c``."""
    if isinstance(f, list):
        return [conjugate_state(t) for t in f]
    return GaussianState(f.d, np.conj(f.c), -np.conj(f.Q), -np.conj(f.b), f.allow_degenerate)


def _terms(f):
    return f if isinstance(f, list) else [f]


def eval_state(f, x):
    """Evaluate a state or sum at points ``x`` (shape ``(..., d)``; for d=1
    plain scalars/vectors are accepted)."""
    terms = _terms(f)
    d = terms[0].d
    x = np.asarray(x, dtype=complex)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    acc = 0
    for t in terms:
        quad = np.einsum("...i,ij,...j->...", x, t.Q, x)
        lin = x @ t.b
        acc = acc + t.c * np.exp(1j * np.pi * quad + 2j * np.pi * lin)
    return acc


eval = eval_state


def _det_pow(M, power):
    """``det(M)^power`` as a product of per-eigenvalue principal powers.

    This is the branch convention used throughout: it is continuous along
    the parameter paths generated by the token semigroup, where the whole
    spectrum stays off the closed negative real axis.
    """
    lam = np.linalg.eigvals(np.atleast_2d(M))
    if np.any(np.abs(lam) < 1e-300):
        raise DecompositionError("singular matrix in determinant power")
    return complex(np.exp(power * np.sum(np.log(lam))))


def gaussian_integral(M, z):
    """``int exp(-pi M y.y - 2 pi i z.y) dy = det(M)^{-1/2} exp(-pi M^{-1} z.z)``.

    Requires ``Re M`` positive definite (absolute convergence).  The
    determinant root is the product of principal eigenvalue roots, which on
    the convergence domain agrees with the continuous branch through
    ``M = I``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ReM = (M.real + M.real.T) / 2
    w = np.linalg.eigvalsh(ReM)
    if w[0] <= 0:
        raise ValidationError("gaussian_integral requires Re M positive definite")
    return _det_pow(M, -0.5) * np.exp(-np.pi * np.linalg.solve(M, z) @ z)


# ----------------------------------------------------------------------------
# phase-space shifts
# ----------------------------------------------------------------------------

def shift(f, z, tau=0.0):
    """Time-frequency shift ``e^{2 pi i tau} e^{-i pi x0.xi0} e^{2 pi i xi0.y} f(y - x0)``
    with real phase-space point ``z = (x0, xi0)``."""
    if isinstance(f, list):
        return [shift(t, z, tau) for t in f]
    z = np.asarray(z, dtype=float)
    d = f.d
    if z.shape != (2 * d,):
        raise ValidationError("shift expects a real phase-space point of length 2d")
    return complex_shift(f, z[:d], z[d:], tau)


def complex_shift(f, zx, zw, tau=0.0):
    """Complexified shift ``e^{2 pi i tau} e^{-i pi z.w} e^{2 pi i w.y} f(y - z)``.

    The parameters may be complex; with ``w = xi0``, ``z = x0`` real this is
    :func:`shift`.  Completing the square in the exponent gives the exact
    parameter update.
    """
    if isinstance(f, list):
        return [complex_shift(t, zx, zw, tau) for t in f]
    zx = np.atleast_1d(np.asarray(zx, dtype=complex))
    zw = np.atleast_1d(np.asarray(zw, dtype=complex))
    b = f.b + zw - f.Q @ zx
    c = f.c * np.exp(2j * np.pi * tau
                     - 1j * np.pi * zx @ zw
                     + 1j * np.pi * (f.Q @ zx) @ zx
                     - 2j * np.pi * f.b @ zx)
    return GaussianState(f.d, c, f.Q, b, f.allow_degenerate)


# ----------------------------------------------------------------------------
# token and word action
# ----------------------------------------------------------------------------

def _apply_fourier(f):
    d = f.d
    lam = np.linalg.eigvals(f.Q)
    if np.min(np.abs(lam)) < 1e-13 * max(1.0, np.max(np.abs(lam))):
        raise UnsupportedDegenerate("Fourier transform of a flat Gaussian leaves the class")
    Qi = np.linalg.inv(f.Q)
    Qp = -(Qi + Qi.T) / 2
    bp = Qi @ f.b
    c = f.c * np.exp(-0.25j * np.pi * d) * _det_pow(-1j * f.Q, -0.5) \
        * np.exp(-1j * np.pi * (Qi @ f.b) @ f.b)
    return GaussianState(d, c, Qp, bp, f.allow_degenerate)


def apply_token(t, f):
    """Apply one generator token to a state or sum; exact in parameters."""
    if isinstance(f, list):
        return [apply_token(t, g) for g in f]
    if not isinstance(t, Token):
        raise ValidationError("apply_token expects a generator token")
    if t.d != f.d:
        raise ValidationError(f"token dimension {t.d} does not match state dimension {f.d}")
    d = f.d
    if t.op == "chirp":
        return GaussianState(d, f.c, f.Q + t.matrix_param(), f.b, f.allow_degenerate)
    if t.op == "rescale":
        E = t.matrix_param().real
        c = f.c * (1j) ** (t.maslov % 4) * np.sqrt(abs(np.linalg.det(E)))
        return GaussianState(d, c, E.T @ f.Q @ E, E.T @ f.b, f.allow_degenerate)
    if t.op == "fourier":
        return _apply_fourier(f)
    if t.op == "multiplier":
        # conjugate a chirp by the Fourier transform: transform, multiply by
        # exp(-i pi P xi.xi), transform again, undo the parity with the
        # phase-correct inverse-transform rescale
        P = t.matrix_param()
        g = _apply_fourier(f)
        g = apply_token(chirp(-P), g)
        g = _apply_fourier(g)
        return apply_token(rescale(-np.eye(d), maslov=d), g)
    if t.op == "atom_r":
        return apply_word(factor_R_theta(t.vector_param()), f)
    if t.op == "atom_p":
        return apply_token(chirp(1j * np.diag(t.vector_param())), f)
    raise ValidationError(f"unknown token op {t.op!r}")


def apply_word(word, f):
    """Apply a generator word; the first token in the list acts last."""
    for t in reversed(word):
        f = apply_token(t, f)
    return f


def apply_matrix(S, f, tol=1e-10):
    """Closed-form action of the operator of a positive symplectic ``S``.

    For ``f`` with parameters ``(Q, b, c)`` and ``S = [[A, B], [C, D]]``:

        Q' = (C + D Q)(A + B Q)^{-1}
        b' = D b - Q' B b
        c' = c det(A + B Q)^{-1/2} exp(-i pi (B b).(D b)) exp(i pi Q'(B b).(B b))

    The phase of the determinant root is the per-eigenvalue principal
    branch, so the result agrees with the word route up to one global
    unimodular constant per word (and exactly in ``Q`` and ``b``).
    """
    if isinstance(f, list):
        return [apply_matrix(S, g, tol) for g in f]
    S = np.asarray(S, dtype=complex)
    A, B, C, D = blocks(S)
    d = f.d
    if A.shape[0] != d:
        raise ValidationError("matrix dimension does not match state dimension")
    T = A + B @ f.Q
    lam = np.linalg.eigvals(T)
    if np.min(np.abs(lam)) < tol * max(1.0, float(np.max(np.abs(lam)))):
        raise DecompositionError("matrix action is singular on this state")
    Qp = (C + D @ f.Q) @ np.linalg.inv(T)
    Qp = (Qp + Qp.T) / 2
    Bb = B @ f.b
    bp = D @ f.b - Qp @ Bb
    c = f.c * _det_pow(T, -0.5) \
        * np.exp(-1j * np.pi * Bb @ (D @ f.b) + 1j * np.pi * (Qp @ Bb) @ Bb)
    return GaussianState(d, c, Qp, bp, f.allow_degenerate)


# ----------------------------------------------------------------------------
# sesquilinear forms
# ----------------------------------------------------------------------------

def inner_product(f, g):
    """L^2 inner product ``<f, g> = int f conj(g)`` of states or sums."""
    total = 0j
    for tf in _terms(f):
        for tg in _terms(g):
            M = -1j * (tf.Q - np.conj(tg.Q))
            z = tf.b - np.conj(tg.b)
            total += tf.c * np.conj(tg.c) * gaussian_integral(M, z)
    return total


def norm(f):
    val = inner_product(f, f).real
    return float(np.sqrt(max(val, 0.0)))


# ----------------------------------------------------------------------------
# Wigner distribution
# ----------------------------------------------------------------------------

def _partial_fourier_second(f, d1):
    """Classical Fourier transform in the last ``d - d1`` variables of a
    2d-block Gaussian state (no metaplectic phase)."""
    d = f.d
    d2 = d - d1
    Q11, Q12 = f.Q[:d1, :d1], f.Q[:d1, d1:]
    Q22 = f.Q[d1:, d1:]
    b1, b2 = f.b[:d1], f.b[d1:]
    lam = np.linalg.eigvals(Q22)
    if np.min(np.abs(lam)) < 1e-13 * max(1.0, float(np.max(np.abs(lam)))):
        raise UnsupportedDegenerate("partial transform of a flat Gaussian leaves the class")
    S22 = np.linalg.inv(Q22)
    S22 = (S22 + S22.T) / 2
    Qp = np.block([
        [Q11 - Q12 @ S22 @ Q12.T, Q12 @ S22],
        [(Q12 @ S22).T, -S22],
    ])
    bp = np.r_[b1 - Q12 @ (S22 @ b2), S22 @ b2]
    c = f.c * _det_pow(-1j * Q22, -0.5) * np.exp(-1j * np.pi * (S22 @ b2) @ b2)
    return GaussianState(d, c, Qp, bp, f.allow_degenerate)


def wigner_gaussian(f, g=None):
    """Cross-Wigner distribution ``W(f, g)`` as a 2d-dimensional Gaussian sum.

    ``W(f, g)(x, xi) = int f(x + y/2) conj(g(x - y/2)) e^{-2 pi i y.xi} dy``
    computed exactly: tensor ``f`` with the conjugate of ``g``, pull back by
    the coordinate change ``(x, y) -> (x + y/2, x - y/2)``, and take the
    classical Fourier transform in ``y``.  ``W(f, f)`` is real; for the
    standard Gaussian ``W = 2^{d/2} exp(-2 pi |z|^2)``.
    """
    if g is None:
        g = f
    fterms, gterms = _terms(f), _terms(g)
    d = fterms[0].d
    Ew = np.block([[np.eye(d), np.eye(d) / 2], [np.eye(d), -np.eye(d) / 2]])
    out = []
    for tf in fterms:
        for tg in gterms:
            tgc = conjugate_state(tg)
            Qt = np.zeros((2 * d, 2 * d), dtype=complex)
            Qt[:d, :d], Qt[d:, d:] = tf.Q, tgc.Q
            h = GaussianState(2 * d, tf.c * tgc.c, Qt, np.r_[tf.b, tgc.b],
                              tf.allow_degenerate or tg.allow_degenerate)
            h = GaussianState(2 * d, h.c, Ew.T @ h.Q @ Ew, Ew.T @ h.b, h.allow_degenerate)
            out.append(_partial_fourier_second(h, d))
    return out if (isinstance(f, list) or isinstance(g, list)) else out[0]


# ----------------------------------------------------------------------------
# intertwining check
# ----------------------------------------------------------------------------

def check_intertwining(word, z, tau, f):
    """Residual of the covariance relation of a word with phase-space shifts.

    Left route: shift by the real point ``z`` (with phase ``tau``), then
    apply the word.  Right route: apply the word, then shift by the
    (generally complex) image ``S z`` under the word's matrix.  The two are
    equal as operators, so the parameters of the resulting sums must match
    term by term, phases included.  Returns the largest relative discrepancy
    over parameters and over pointwise samples.
    """
    terms = _terms(f)
    d = terms[0].d
    z = np.asarray(z, dtype=float)
    S = word_to_matrix(word)
    if word_dim(word) != d or z.shape != (2 * d,):
        raise ValidationError("word, state, and shift dimensions must agree")
    Sz = S @ z

    left = [apply_word(word, shift(t, z, tau)) for t in terms]
    right = [complex_shift(apply_word(word, t), Sz[:d], Sz[d:], tau) for t in terms]

    res = 0.0
    for lt, rt in zip(left, right):
        res = max(res, np.linalg.norm(lt.Q - rt.Q) / max(1.0, np.linalg.norm(lt.Q)))
        res = max(res, np.linalg.norm(lt.b - rt.b) / max(1.0, np.linalg.norm(lt.b)))
        res = max(res, abs(lt.c - rt.c) / max(1.0, abs(lt.c)))

    ts = np.linspace(-1.5, 1.5, 7)
    dirs = [np.ones(d), np.eye(d)[0]]
    pts = np.concatenate([np.outer(ts, v) for v in dirs], axis=0)
    lv = eval_state(left, pts)
    rv = eval_state(right, pts)
    res = max(res, float(np.max(np.abs(lv - rv)) / max(1.0, float(np.max(np.abs(lv))))))
    return float(res)
