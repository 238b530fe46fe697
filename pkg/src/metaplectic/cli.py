"""Command line driver.

Every subcommand reads JSON from files (or ``-`` for stdin), writes to
``--out`` (default stdout), and maps failures to stable exit codes:
1 for validation errors (bad mathematical input), 2 for format errors
(malformed files or impossible output requests), 3 for numerical errors
(degenerate decompositions, branch failures).
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from . import __version__
from .errors import FormatError, NumericalError, ValidationError
from . import evoprop, formats, gausscalc, gridlab, sympcore, tfrzoo


def _read_text(path, what="input"):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r") as fh:
            return fh.read()
    except OSError as e:
        raise FormatError(f"cannot read {what} from '{path}': {e}")


def _read_json(path, what="input"):
    text = _read_text(path, what)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{what} is not valid JSON: {e}")


def _emit(out, payload):
    if isinstance(payload, str):
        payload = payload.encode()
    if out == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        try:
            with open(out, "wb") as fh:
                fh.write(payload)
        except OSError as e:
            raise FormatError(f"cannot write to '{out}': {e}")


def _emit_json(out, obj):
    _emit(out, formats.dumps_json(obj) + "\n")


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FormatError as e:
            click.echo(f"format error: {e}", err=True)
            sys.exit(2)
        except ValidationError as e:
            click.echo(f"validation error: {e}", err=True)
            sys.exit(1)
        except NumericalError as e:
            click.echo(f"numerical error: {e}", err=True)
            sys.exit(3)
    return wrapper


def _out_option(fn):
    return click.option("--out", default="-", show_default=True,
                        help="Output file, or '-' for stdout.")(fn)


def _tol_option(fn):
    return click.option("--tol", type=float, default=1e-10, show_default=True,
                        help="Relative tolerance for structural tests.")(fn)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(version=__version__, prog_name="metaplectic")
@click.option("--seed", type=int, default=None,
              help="Seed for randomized cross-checks (reserved).")
@click.pass_context
def main(ctx, seed):
    """Calculus of complex symplectic words, Gaussian states, covariant
    time-frequency representations, and quadratic flows."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed


# ----------------------------------------------------------------------------
# classify / polar
# ----------------------------------------------------------------------------

@main.command()
@click.option("--matrix", "matrix_path", required=True,
              help="Complex symplectic matrix JSON (file or '-').")
@click.option("--mode", type=click.Choice(["positivity", "triangular", "conjugation"]),
              default="positivity", show_default=True,
              help="Eigenvalue certificate, block-triangular clauses, or "
                   "conjugation-symmetric clauses with word synthesis.")
@_tol_option
@_out_option
@_guarded
def classify(matrix_path, mode, tol, out):
    """Classify a matrix against the positive symplectic cone."""
    _d, S = formats.load_matrix(_read_json(matrix_path, "matrix"), "matrix")
    if mode == "positivity":
        payload = sympcore.classify_positivity(S, tol=tol).to_dict()
    elif mode == "triangular":
        payload = sympcore.classify_block_triangular(S, tol=tol)
    else:
        payload = sympcore.classify_conjugation_commuting(S, tol=tol)
        if payload.get("word") is not None:
            payload["word"] = formats.dump_word(payload["word"])
    _emit_json(out, payload)


@main.command()
@click.option("--matrix", "matrix_path", required=True,
              help="Positive symplectic matrix JSON (file or '-').")
@_tol_option
@_out_option
@_guarded
def polar(matrix_path, tol, out):
    """Split a positive matrix into real and exponential-type factors."""
    d, S = formats.load_matrix(_read_json(matrix_path, "matrix"), "matrix")
    pol = sympcore.matrix_polar(S, tol=tol)
    dd = pol.U.shape[0] // 2
    _emit_json(out, {
        "U": formats.dump_matrix(pol.U, dd),
        "Z": formats.dump_matrix(pol.Z, dd),
        "residual": pol.residual,
    })


# ----------------------------------------------------------------------------
# gaussian
# ----------------------------------------------------------------------------

@main.group()
def gaussian():
    """Closed-form action on Gaussian states."""


def _load_state_or_sum(obj, what):
    if isinstance(obj, list):
        return formats.load_sum(obj, what)
    return formats.load_state(obj, what)


def _dump_state_or_sum(f):
    if isinstance(f, list):
        return formats.dump_sum(f)
    return formats.dump_state(f)


@gaussian.command("apply")
@click.option("--word", "word_path", default=None, help="Token word JSON.")
@click.option("--matrix", "matrix_path", default=None,
              help="Positive symplectic matrix JSON (used when no word is given).")
@click.option("--state", "state_path", required=True,
              help="Gaussian state or sum JSON (file or '-').")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "bin"]),
              default="json", show_default=True)
@click.option("--grid-n", type=int, default=256, show_default=True,
              help="Samples per axis for csv/bin output.")
@click.option("--grid-h", type=float, default=None,
              help="Grid spacing for csv/bin output (default: self-dual 1/sqrt(n)).")
@_tol_option
@_out_option
@_guarded
def gaussian_apply(word_path, matrix_path, state_path, fmt, grid_n, grid_h, tol, out):
    """Apply a word (or a positive matrix) to a Gaussian state."""
    f = _load_state_or_sum(_read_json(state_path, "state"), "state")
    if (word_path is None) == (matrix_path is None):
        raise FormatError("exactly one of --word and --matrix must be given")
    if word_path is not None:
        word = formats.load_word(_read_json(word_path, "word"))
        g = gausscalc.apply_word(word, f)
    else:
        _d, S = formats.load_matrix(_read_json(matrix_path, "matrix"), "matrix")
        g = gausscalc.apply_matrix(S, f, tol=tol)
    if fmt == "json":
        _emit_json(out, _dump_state_or_sum(g))
        return
    dim = g[0].d if isinstance(g, list) else g.d
    spec = gridlab.GridSpec(dim, grid_n, grid_h if grid_h else 1.0 / np.sqrt(grid_n))
    gf = gridlab.sample(g, spec)
    _emit(out, formats.grid_csv(gf) if fmt == "csv" else formats.write_mpgf(gf))


@gaussian.command("wigner")
@click.option("--state", "state_path", required=True,
              help="Gaussian state or sum JSON for the first slot.")
@click.option("--state2", "state2_path", default=None,
              help="Optional second slot (cross distribution).")
@_out_option
@_guarded
def gaussian_wigner(state_path, state2_path, out):
    """Phase-space distribution of a Gaussian pair, in closed form."""
    f = _load_state_or_sum(_read_json(state_path, "state"), "state")
    g = None
    if state2_path is not None:
        g = _load_state_or_sum(_read_json(state2_path, "second state"), "second state")
    W = gausscalc.wigner_gaussian(f, g)
    _emit_json(out, _dump_state_or_sum(W))


@gaussian.command("intertwine")
@click.option("--word", "word_path", required=True, help="Token word JSON.")
@click.option("--state", "state_path", required=True, help="Gaussian state or sum JSON.")
@click.option("--z", "z_text", required=True,
              help="Phase-space shift, comma-separated (x..., xi...).")
@click.option("--tau", type=float, default=0.0, show_default=True,
              help="Phase parameter of the shift.")
@_out_option
@_guarded
def gaussian_intertwine(word_path, state_path, z_text, tau, out):
    """Residual of the exact shift-intertwining relation for a word."""
    word = formats.load_word(_read_json(word_path, "word"))
    f = _load_state_or_sum(_read_json(state_path, "state"), "state")
    try:
        z = np.array([float(v) for v in z_text.split(",")], dtype=float)
    except ValueError:
        raise FormatError("--z must be a comma-separated list of numbers")
    _emit_json(out, gausscalc.check_intertwining(word, z, tau, f))


# ----------------------------------------------------------------------------
# tfr
# ----------------------------------------------------------------------------

@main.group()
def tfr():
    """Covariant time-frequency representations."""


@tfr.command("classify")
@click.option("--tfr", "tfr_path", required=True,
              help="Representation spec JSON (file or '-').")
@click.option("--tol", type=float, default=1e-8, show_default=True)
@_out_option
@_guarded
def tfr_classify(tfr_path, tol, out):
    """Full structural report: covariance, symmetry, spectrogram windows."""
    spec = formats.load_tfrspec(_read_json(tfr_path, "representation spec"))
    covariant, clauses = tfrzoo.is_covariant(spec)
    payload = {"covariant": covariant, "clauses": clauses}
    if covariant:
        payload["conjugation_symmetric"] = tfrzoo.conjugation_symmetric(spec)
        try:
            rep = tfrzoo.classify_spectrogram(spec, tol=tol)
            rep = dict(rep)
            for key in ("window_f", "window_g"):
                if rep.get(key) is not None:
                    rep[key] = formats.dump_state(rep[key])
            if "kappa" in rep:
                rep["kappa"] = formats.dump_complex(rep["kappa"])
            payload["spectrogram"] = rep
        except NumericalError as e:
            payload["spectrogram"] = {"spectrogram": False, "note": str(e)}
        try:
            pure = dict(tfrzoo.classify_pure_spectrogram(spec, tol=tol))
            if pure.get("window") is not None:
                pure["window"] = formats.dump_state(pure["window"])
            payload["pure_spectrogram"] = pure
        except NumericalError as e:
            payload["pure_spectrogram"] = {"pure": False, "note": str(e)}
    _emit_json(out, payload)


@tfr.command("kernel")
@click.option("--tfr", "tfr_path", required=True,
              help="Representation spec JSON (file or '-').")
@_out_option
@_guarded
def tfr_kernel(tfr_path, out):
    """Convolution kernel against the Wigner distribution."""
    spec = formats.load_tfrspec(_read_json(tfr_path, "representation spec"))
    ker = dict(tfrzoo.cohen_kernel(spec))
    if ker["type"] == "gaussian":
        ker["state"] = formats.dump_state(ker["state"])
    elif ker["type"] == "chirp":
        ker["B"] = formats.dump_matrix(ker["B"], 2 * spec.d)
    _emit_json(out, ker)


@tfr.command("windows")
@click.option("--tfr", "tfr_path", required=True,
              help="Representation spec JSON (file or '-').")
@click.option("--tol", type=float, default=1e-8, show_default=True)
@_out_option
@_guarded
def tfr_windows(tfr_path, tol, out):
    """Window pair of a spectrogram-type representation."""
    spec = formats.load_tfrspec(_read_json(tfr_path, "representation spec"))
    rep = tfrzoo.classify_spectrogram(spec, tol=tol)
    if not rep["spectrogram"]:
        raise ValidationError(f"representation is not a spectrogram: {rep['clauses']}")
    _emit_json(out, {
        "window_f": formats.dump_state(rep["window_f"]),
        "window_g": formats.dump_state(rep["window_g"]),
        "kappa": formats.dump_complex(rep["kappa"]),
    })


# ----------------------------------------------------------------------------
# evolve
# ----------------------------------------------------------------------------

@main.command()
@click.option("--example", type=click.Choice(["heat", "hermite", "harmonic"]),
              default=None, help="Built-in model (alternative to --hamiltonian).")
@click.option("--hamiltonian", "ham_path", default=None,
              help="Coefficient matrix JSON (file or '-').")
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--dim", type=int, default=1, show_default=True,
              help="Dimension for heat/hermite models.")
@click.option("--d1", type=int, default=1, show_default=True,
              help="Hyperbolic coordinates of the harmonic model.")
@click.option("--d2", type=int, default=1, show_default=True,
              help="Elliptic coordinates of the harmonic model.")
@click.option("--t-max", type=float, default=2.0, show_default=True)
@click.option("--t-steps", type=int, default=20, show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--q", type=float, default=None, help="Defaults to p.")
@click.option("--s", type=float, default=0.0, show_default=True)
@click.option("--grid-n", type=int, default=256, show_default=True,
              help="Grid size for the discrete modulation-norm column.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="csv", show_default=True)
@_out_option
@_guarded
def evolve(example, ham_path, alpha, beta, dim, d1, d2, t_max, t_steps,
           p, q, s, grid_n, fmt, out):
    """Diagnostics of a quadratic flow along a time grid."""
    if (example is None) == (ham_path is None):
        raise FormatError("exactly one of --example and --hamiltonian must be given")
    if example == "heat":
        H = evoprop.heat_hamiltonian(alpha, beta, dim)
    elif example == "hermite":
        H = evoprop.hermite_hamiltonian(alpha, beta, dim)
    elif example == "harmonic":
        H = evoprop.harmonic_hamiltonian(d1, d2)
    else:
        H = formats.load_hamiltonian(_read_json(ham_path, "Hamiltonian"))
    if t_steps < 1:
        raise FormatError("--t-steps must be at least 1")
    times = [t_max * (k + 1) / t_steps for k in range(t_steps)]
    rows = evoprop.evolve_trajectory(H, times, p=p, q=q, s=s, grid_n=grid_n)
    if fmt == "csv":
        _emit(out, formats.rows_csv(rows, evoprop.EVOLVE_COLUMNS))
    else:
        _emit_json(out, rows)
