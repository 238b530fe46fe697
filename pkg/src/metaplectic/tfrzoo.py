"""Covariant time-frequency representations and their classification.

A covariant quadratic representation of signals on R^d is determined by a
``4d x 4d`` complex symplectic matrix acting on the doubled phase space; the
admissible ones form a three-parameter family ``(A11, A13, A21)`` and act on
the Wigner distribution by convolution with a Gaussian-chirp kernel whose
symbol exponent is the ``2d x 2d`` symmetric matrix

    B = [[A13, I/2 - A11], [I/2 - A11^T, -A21]],       Im B <= 0.

This module builds and recognizes such matrices, extracts the convolution
kernel, decides when the representation is a (cross-)spectrogram and
produces its window pair in closed form, recognizes the conjugation-
symmetric subfamily, and assembles the doubled-phase-space operator word of
a metaplectic operator given in split form.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ModelError,
    UnsupportedSingularBlock,
    ValidationError,
)
from .gausscalc import GaussianState, apply_token, wigner_gaussian
from .gridlab import GridFn, grid_fourier, grid_fourier_inverse, grid_wigner, _chirp_values
from .sympcore import (
    atom_p,
    atom_r,
    chirp,
    classify_positivity,
    fourier,
    multiplier,
    rescale,
    require_symplectic,
    tilde,
    word_to_matrix,
)

__all__ = [
    "TFRSpec",
    "build_covariant",
    "is_covariant",
    "symbol_exponent",
    "cohen_kernel",
    "tfr_gaussian",
    "tfr_grid",
    "classify_spectrogram",
    "classify_pure_spectrogram",
    "conjugation_symmetric",
    "SplitWord",
    "split_to_word",
    "wigner_operator",
]


@dataclass
class TFRSpec:
    """A covariant representation: dimension ``d`` and its ``4d x 4d`` matrix."""

    d: int
    A: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if A.shape != (4 * self.d, 4 * self.d):
            raise ValidationError(f"representation matrix must be {4*self.d} x {4*self.d}")
        self.A = A


def _bl(A, i, j, d):
    return A[i * d:(i + 1) * d, j * d:(j + 1) * d]


def _sym(M, tol, what):
    M = np.asarray(M, dtype=complex)
    if np.linalg.norm(M - M.T) > tol * max(1.0, np.linalg.norm(M)):
        raise ValidationError(f"{what} must be symmetric")
    return (M + M.T) / 2


def build_covariant(A11, A13, A21, tol=1e-10):
    """Assemble the covariant representation with parameter blocks
    ``(A11, A13, A21)`` (``A13``, ``A21`` symmetric, ``Im B <= 0``).

    The classical Wigner distribution is ``(I/2, 0, 0)``; the Husimi
    transform is ``(I/2, -iI/2, iI/2)``.
    """
    A11 = np.atleast_2d(np.asarray(A11, dtype=complex))
    d = A11.shape[0]
    A13 = _sym(np.atleast_2d(A13), tol, "A13 parameter")
    A21 = _sym(np.atleast_2d(A21), tol, "A21 parameter")
    I, O = np.eye(d), np.zeros((d, d))
    A = np.block([
        [A11, I - A11, A13, A13],
        [A21, -A21, I - A11.T, -A11.T],
        [O, O, I, I],
        [-I, I, O, O],
    ])
    spec = TFRSpec(d, A)
    B = symbol_exponent(spec)
    w = np.linalg.eigvalsh(B.imag)
    if w[-1] > tol * max(1.0, float(np.max(np.abs(w)))):
        raise ValidationError("symbol exponent needs Im B <= 0; "
                              "this parameter triple is outside the covariant cone")
    require_symplectic(A, what="covariant representation matrix")
    rep = classify_positivity(A)
    if not rep.positive:
        raise ModelError("covariant matrix with admissible symbol failed the positivity test")
    return spec


def is_covariant(spec, tol=1e-9):
    """Check the covariant block pattern and the symbol sign condition.

    Returns ``(bool, clauses)``; the clauses record which structural
    equation failed first, the symmetry of the parameter blocks, and the
    semidefiniteness of the symbol exponent.
    """
    A = spec.A if isinstance(spec, TFRSpec) else np.asarray(spec, dtype=complex)
    d = A.shape[0] // 4
    A11, A13, A21 = _bl(A, 0, 0, d), _bl(A, 0, 2, d), _bl(A, 1, 0, d)
    I, O = np.eye(d), np.zeros((d, d))
    pattern = np.block([
        [A11, I - A11, A13, A13],
        [A21, -A21, I - A11.T, -A11.T],
        [O, O, I, I],
        [-I, I, O, O],
    ])
    scale = max(1.0, np.linalg.norm(A))
    clauses = {
        "blocks_match_pattern": bool(np.linalg.norm(A - pattern) <= tol * scale),
        "a13_symmetric": bool(np.linalg.norm(A13 - A13.T) <= tol * scale),
        "a21_symmetric": bool(np.linalg.norm(A21 - A21.T) <= tol * scale),
    }
    if all(clauses.values()):
        B = np.block([[A13, I / 2 - A11], [I / 2 - A11.T, -A21]])
        w = np.linalg.eigvalsh((B.imag + B.imag.T) / 2)
        clauses["symbol_signature"] = bool(w[-1] <= tol * max(1.0, float(np.max(np.abs(w)))))
        clauses["symplectic"] = bool(
            classify_positivity(A).klass != "NotSymplectic")
    else:
        clauses["symbol_signature"] = False
        clauses["symplectic"] = False
    return all(clauses.values()), clauses


def symbol_exponent(spec):
    """The symmetric ``2d x 2d`` exponent ``B`` of the multiplier symbol
    ``exp(-i pi B zeta . zeta)`` relating the representation to Wigner."""
    A = spec.A
    d = spec.d
    A11, A13, A21 = _bl(A, 0, 0, d), _bl(A, 0, 2, d), _bl(A, 1, 0, d)
    I = np.eye(d)
    B = np.block([[A13, I / 2 - A11], [I / 2 - A11.T, -A21]])
    return (B + B.T) / 2


def cohen_kernel(spec, tol=1e-12):
    """Convolution kernel against the Wigner distribution.

    * ``B = 0``: point mass (the representation *is* Wigner) --
      ``{"type": "delta"}``.
    * ``Im B`` negative definite: a decaying Gaussian state on the doubled
      phase space, ``{"type": "gaussian", "state": ...}`` with
      ``Q = B^{-1}`` and amplitude ``det(iB)^{-1/2}``.
    * otherwise a pure chirp usable on grids only,
      ``{"type": "chirp", "B": B}``.
    """
    ok, _ = is_covariant(spec)
    if not ok:
        raise ValidationError("kernel extraction needs a covariant representation")
    B = symbol_exponent(spec)
    scale = max(1.0, np.linalg.norm(spec.A))
    if np.linalg.norm(B) <= tol * scale:
        return {"type": "delta"}
    w = np.linalg.eigvalsh(B.imag)
    if w[-1] < -1e-10 * max(1.0, float(np.max(np.abs(w)))):
        Q = np.linalg.inv(B)
        Q = (Q + Q.T) / 2
        lam = np.linalg.eigvals(1j * B)
        c = complex(np.exp(-0.5 * np.sum(np.log(lam))))
        return {"type": "gaussian",
                "state": GaussianState(2 * spec.d, c, Q, np.zeros(2 * spec.d))}
    return {"type": "chirp", "B": B}


def _scale_amp(f, s):
    if isinstance(f, list):
        return [_scale_amp(t, s) for t in f]
    return replace(f, c=f.c * s)


def _classical_fourier_state(f, dim):
    # the Fourier token carries the i^{-dim/2} normalization; undo it
    return _scale_amp(apply_token(fourier(dim), f), np.exp(0.25j * np.pi * dim))


def _classical_fourier_inverse_state(f, dim):
    # classical inverse = parity then classical forward transform
    g = apply_token(rescale(-np.eye(dim), maslov=0), f)
    return _classical_fourier_state(g, dim)


def tfr_gaussian(spec, f, g=None):
    """The representation applied to a Gaussian pair, in closed form.

    Multiplies the classical Fourier transform of ``W(f, g)`` by the symbol
    ``exp(-i pi B zeta.zeta)`` and transforms back; every step stays inside
    the Gaussian class.
    """
    W = wigner_gaussian(f, g)
    B = symbol_exponent(spec)
    if np.linalg.norm(B) == 0.0:
        return W
    dim = 2 * spec.d
    H = _classical_fourier_state(W, dim)
    H = apply_token(chirp(-B), H)
    return _classical_fourier_inverse_state(H, dim)


def tfr_grid(spec, f, g=None):
    """The representation applied to sampled signals (d = 1): Wigner on the
    self-dual grid, then the multiplier symbol in the transform domain.
    Handles chirp-type kernels that have no Gaussian convolution form."""
    if spec.d != 1:
        raise ValidationError("grid route supports d = 1 signals")
    W = grid_wigner(f, g)
    B = symbol_exponent(spec)
    if np.linalg.norm(B) == 0.0:
        return W
    G = grid_fourier(W)
    G = GridFn(G.spec, G.values * _chirp_values(G.spec, -B))
    return grid_fourier_inverse(G)


# ----------------------------------------------------------------------------
# spectrogram recognition
# ----------------------------------------------------------------------------

def _principal_sqrt(z):
    return complex(np.sqrt(complex(z)))


def classify_spectrogram(spec, tol=1e-8):
    """Decide whether the representation is a cross-spectrogram
    ``A(f, g) = V_phi f * conj(V_psi g)`` and produce the window pair.

    The three structural clauses are: the consistency equation
    ``A21 + A11^T A13^{-1} (A11 - I) = 0`` and the two decay signatures
    ``Im(A11^T A13^{-1}) >= 0`` and ``Im(A13^{-1}(A11 - I)) <= 0``.  When
    they hold the windows are Gaussians with exponents

        phi:  -conj(A13^{-1} A11),      psi:  -A13^{-1}(A11 - I)

    and amplitudes ``c1 = conj(sqrt(kappa)) u``, ``c2 = sqrt(kappa) u``
    where ``kappa = det(i A13)^{-1/2}`` and ``u = (kappa/|kappa|)^{1/2}``,
    so that both ``c1 c2 = kappa`` and ``conj(c1) c2 = kappa`` hold; the
    latter is what the factorization identity requires.

    Raises
    ------
    UnsupportedSingularBlock
        If ``A13`` is numerically singular (the representation degenerates
        to a non-spectrogram boundary case).
    """
    ok, cov = is_covariant(spec)
    if not ok:
        raise ValidationError(f"not a covariant representation: {cov}")
    d = spec.d
    A = spec.A
    A11, A13, A21 = _bl(A, 0, 0, d), _bl(A, 0, 2, d), _bl(A, 1, 0, d)
    sv = np.linalg.svd(A13, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise UnsupportedSingularBlock("window extraction needs invertible A13")
    X = np.linalg.inv(A13)
    I = np.eye(d)
    scale = max(1.0, np.linalg.norm(A11), np.linalg.norm(A21), np.linalg.norm(X))

    consistency = np.linalg.norm(A21 + A11.T @ X @ (A11 - I)) <= tol * scale ** 2
    M_f = (A11.T @ X).imag
    M_f = (M_f + M_f.T) / 2
    w_f = np.linalg.eigvalsh(M_f)
    decay_f = bool(w_f[0] >= -tol * max(1.0, float(np.max(np.abs(w_f))) if w_f.size else 0.0))
    M_g = (X @ (A11 - I)).imag
    M_g = (M_g + M_g.T) / 2
    w_g = np.linalg.eigvalsh(M_g)
    decay_g = bool(w_g[-1] <= tol * max(1.0, float(np.max(np.abs(w_g))) if w_g.size else 0.0))

    clauses = {
        "window_consistency": bool(consistency),
        "window_decay_f": decay_f,
        "window_decay_g": decay_g,
    }
    report = {"spectrogram": all(clauses.values()), "clauses": clauses,
              "window_f": None, "window_g": None}
    if not report["spectrogram"]:
        return report

    lam = np.linalg.eigvals(1j * A13)
    kappa = complex(np.exp(-0.5 * np.sum(np.log(lam))))
    u = _principal_sqrt(kappa / abs(kappa))
    c1 = np.conj(_principal_sqrt(kappa)) * u
    c2 = _principal_sqrt(kappa) * u

    q_f = np.conj(X @ A11)
    q_f = (q_f + q_f.T) / 2
    q_g = X @ (A11 - I)
    q_g = (q_g + q_g.T) / 2

    def window(c, q):
        wq = np.linalg.eigvalsh((-q).imag)
        degenerate = wq[0] <= 1e-12 * max(1.0, float(np.max(np.abs(wq))) if wq.size else 0.0)
        return GaussianState(d, c, -q, np.zeros(d), allow_degenerate=bool(degenerate))

    report["window_f"] = window(c1, q_f)
    report["window_g"] = window(c2, q_g)
    report["kappa"] = kappa
    return report


def classify_pure_spectrogram(spec, tol=1e-8):
    """Decide whether the representation is a genuine spectrogram
    ``|V_phi f|^2`` (both windows equal) and produce the single window.

    Clauses: ``Re A11 = I/2``; ``A13`` purely imaginary with ``Im A13``
    negative definite; and the moment consistency
    ``A21 = A13^{-1}/4 + Im(A11)^T A13^{-1} Im(A11)``.  The window amplitude
    is then ``det(i A13)^{-1/4} > 0``.
    """
    ok, cov = is_covariant(spec)
    if not ok:
        raise ValidationError(f"not a covariant representation: {cov}")
    d = spec.d
    A = spec.A
    A11, A13, A21 = _bl(A, 0, 0, d), _bl(A, 0, 2, d), _bl(A, 1, 0, d)
    I = np.eye(d)
    scale = max(1.0, np.linalg.norm(A11), np.linalg.norm(A13), np.linalg.norm(A21))

    re_half = np.linalg.norm(A11.real - I / 2) <= tol * scale
    wIm = np.linalg.eigvalsh(A13.imag)
    a13_imag = (np.linalg.norm(A13.real) <= tol * scale) and bool(wIm[-1] < 0)
    clauses = {"re_a11_half": bool(re_half), "a13_imaginary": bool(a13_imag)}
    if a13_imag:
        X = np.linalg.inv(A13)
        target = X / 4 + A11.imag.T @ X @ A11.imag
        clauses["a21_consistency"] = bool(
            np.linalg.norm(A21 - target) <= tol * max(1.0, np.linalg.norm(target)))
    else:
        clauses["a21_consistency"] = False

    report = {"pure": all(clauses.values()), "clauses": clauses, "window": None}
    if not report["pure"]:
        return report

    X = np.linalg.inv(A13)
    lam = np.linalg.eigvals(1j * A13)
    kappa = complex(np.exp(-0.5 * np.sum(np.log(lam))))
    if abs(kappa.imag) > 1e-10 * abs(kappa) or kappa.real <= 0:
        raise ModelError("pure spectrogram amplitude must be positive")
    q = X @ (A11 - I)
    q = (q + q.T) / 2
    q_alt = np.conj(X @ A11)
    if np.linalg.norm(q - (q_alt + q_alt.T) / 2) > 1e-8 * max(1.0, np.linalg.norm(q)):
        raise ModelError("pure spectrogram windows failed to coincide")
    c = _principal_sqrt(kappa)
    report["window"] = GaussianState(d, c, -q, np.zeros(d))
    return report


# ----------------------------------------------------------------------------
# conjugation symmetry
# ----------------------------------------------------------------------------

def _wigner_matrix(d):
    I, O = np.eye(d), np.zeros((d, d))
    return np.block([
        [I / 2, I / 2, O, O],
        [O, O, I / 2, -I / 2],
        [O, O, I, I],
        [-I, I, O, O],
    ])


def conjugation_symmetric(spec, tol=1e-9, detail=False):
    """Is ``A(f, f)`` real for every signal, i.e. does the representation
    commute with complex conjugation?

    Two independent tests are run and cross-asserted: the block pattern of
    the matrix itself (columns 2 and 4 are signed conjugates of columns 1
    and 3), and the tilde-symmetry of the transition matrix against the
    classical Wigner representation.
    """
    A = spec.A if isinstance(spec, TFRSpec) else np.asarray(spec, dtype=complex)
    d = A.shape[0] // 4
    scale = max(1.0, np.linalg.norm(A))

    # column pattern: sign +1 for the first two block rows, -1 for the last
    # two in column 2, and the opposite in column 4
    defect = 0.0
    for r in range(4):
        s = 1.0 if r < 2 else -1.0
        defect = max(defect, np.linalg.norm(_bl(A, r, 1, d) - s * np.conj(_bl(A, r, 0, d))))
        defect = max(defect, np.linalg.norm(_bl(A, r, 3, d) + s * np.conj(_bl(A, r, 2, d))))
    pattern = bool(defect <= tol * scale)

    T = A @ np.linalg.inv(_wigner_matrix(d))
    cross = bool(np.linalg.norm(T - tilde(T)) <= max(tol, 1e-9) * max(1.0, np.linalg.norm(T)))
    if pattern != cross:
        raise ModelError("conjugation-symmetry tests disagree")
    if detail:
        return pattern, {"column_pattern": pattern, "transition_tilde_fixed": cross}
    return pattern


# ----------------------------------------------------------------------------
# doubled-phase-space operator
# ----------------------------------------------------------------------------

@dataclass
class SplitWord:
    """A word in split form: real prefix, atom pair, real suffix.

    The operator is ``U1_hat . Xi_hat . U2_hat`` where ``U1``/``U2`` are
    words of real-parameter tokens and ``Xi`` the atom with parameters
    ``(theta, delta)`` of disjoint support.
    """

    u1: list
    theta: np.ndarray
    delta: np.ndarray
    u2: list

    def __post_init__(self):
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        self.delta = np.atleast_1d(np.asarray(self.delta, dtype=float))


def _require_real_word(word, what):
    for t in word:
        if t.op in ("fourier", "rescale"):
            continue
        if t.op in ("chirp", "multiplier"):
            M = t.matrix_param()
            if np.linalg.norm(M.imag) <= 1e-12 * max(1.0, np.linalg.norm(M)):
                continue
        raise ValidationError(f"{what} must consist of real-parameter tokens; "
                              "atoms belong to the middle factor")


def split_to_word(split):
    """Flatten a split word into an ordinary token list (leftmost acts last)."""
    mid = [atom_r(split.theta), atom_p(split.delta)]
    return list(split.u1) + mid + list(split.u2)


def wigner_operator(split, tol=1e-10):
    """Word of the doubled-phase-space operator ``K`` with
    ``K W(f, g) = W(S_hat f, S_hat g)`` (up to one unimodular constant).

    Input must be in split form; the two real factors conjugate the doubled
    atom by the partial Fourier transform in the second ``d`` variables,
    realized exactly by chirp/multiplier triples.  For a real word (trivial
    atom) the middle eight tokens collapse to the identity and ``K`` reduces
    to the coordinate change by ``(U1 U2)^{-1}``.
    """
    if not isinstance(split, SplitWord):
        raise ValidationError("wigner_operator expects a word in split form")
    d = split.theta.size
    if split.delta.size != d:
        raise ValidationError("atom parameter vectors must have equal length")
    if np.any(split.theta < 0) or np.any(split.delta < 0):
        raise ValidationError("atom parameters must be nonnegative")
    if np.any(split.theta * split.delta > tol):
        raise ValidationError("atom parameters must have disjoint supports")
    _require_real_word(split.u1, "the split prefix")
    _require_real_word(split.u2, "the split suffix")

    U1 = word_to_matrix(split.u1).real if split.u1 else np.eye(2 * d)
    U2 = word_to_matrix(split.u2).real if split.u2 else np.eye(2 * d)
    E2 = np.diag(np.r_[np.zeros(d), np.ones(d)])
    s2 = np.sqrt(2.0)

    return [
        rescale(s2 * np.linalg.inv(U1)),
        chirp(E2), multiplier(-E2), chirp(E2),
        atom_p(np.r_[split.delta, split.delta]),
        atom_r(np.r_[split.theta, split.theta]),
        chirp(-E2), multiplier(E2), chirp(-E2),
        rescale(np.linalg.inv(U2) / s2),
    ]
