"""
Command line interface: analyze, surface, cover, scan and pairing.

Exit codes: 0 success, 1 input does not parse, 2 input parses but is rejected
(invalid representation, wrong presentation shape, non-cocycle, out-of-range
surface).
"""
import functools
import logging
import math
import sys
from typing import Optional

import click

from config import DEFAULT_TOLERANCES, __version__
from errors import CharvarError, PresentationSyntaxError
from input_parser import format_representation, parse_document
from logs import configure_logging
from rep import GroupSpec, random_surface_representation
from report import (
    build_analysis_report, canonical_json, complex_pair, cover_to_text, pairing_to_dict,
    scan_to_csv, scan_to_dict, scan_to_text,
)
from smoothness import expected_dimension, scan_family
from surfaces import (
    SurfaceKind, canonical_presentation, cup_pairing, h1_pairing, lagrangian_check,
    orientation_double_cover,
)


log = logging.getLogger(__name__)

EXIT_PARSE = 1
EXIT_INVALID = 2


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(command):
    """Maps package exceptions onto the exit code contract"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except PresentationSyntaxError as e:
            log.debug("parse error", exc_info=True)
            _fail(EXIT_PARSE, str(e))
        except (CharvarError, ValueError) as e:
            log.debug("rejected input", exc_info=True)
            _fail(EXIT_INVALID, str(e))

    return wrapper


def _tolerances(tol: Optional[float]):
    return DEFAULT_TOLERANCES if tol is None else DEFAULT_TOLERANCES.with_rank_rel(tol)


def _read(path: str) -> str:
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
        log.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


tol_option = click.option('--tol', type=float, default=None,
                          help='Relative singular value cutoff for rank decisions (default 1e-9).')
format_option = click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default='json',
                             show_default=True)
out_option = click.option('--out', type=click.Path(dir_okay=False), default=None,
                          help='Write the report to this file instead of stdout.')
input_argument = click.argument('path', type=click.Path(exists=True, dir_okay=False))


@click.group()
@click.option('-v', '--verbose', count=True, help='-v for progress, -vv for debug output.')
@click.option('--log-dir', type=click.Path(file_okay=False), default=None,
              help='Also append JSON-lines run logs to <log-dir>/charvar_<YYYYMMDD>.log.')
@click.version_option(__version__, prog_name='charvar')
def cli(verbose: int, log_dir: Optional[str]):
    """Deformation invariants of representations of finitely presented groups."""
    configure_logging(verbose, log_dir)


@cli.command()
@input_argument
@tol_option
@format_option
@out_option
@click.option('--t', 't_value', type=float, default=None,
              help='Evaluate a family file at this parameter value.')
@handle_errors
def analyze(path, tol, fmt, out, t_value):
    """Cohomology, classification and smoothness verdict for one representation."""
    if t_value is not None and not math.isfinite(t_value):
        raise click.BadParameter(f"t must be a finite number, got {t_value}", param_hint='--t')
    tolerances = _tolerances(tol)
    doc = parse_document(_read(path))
    rep = doc.representation(t_value)
    report = build_analysis_report(rep, tolerances)
    _emit(report.to_json() if fmt == 'json' else report.to_text(), out)


@cli.command()
@click.option('--orientable', 'genus', type=int, default=None, help='Genus g of an orientable surface.')
@click.option('--nonorientable', 'crosscaps', type=int, default=None,
              help='Number h of projective plane summands.')
@click.option('--group', 'group', default='SL(2,C)', show_default=True)
@click.option('--seed', type=int, default=None,
              help='Also emit an input file for a random representation drawn with this seed.')
@format_option
@out_option
@handle_errors
def surface(genus, crosscaps, group, seed, fmt, out):
    """Canonical surface presentation and the expected dimension of its character variety."""
    if (genus is None) == (crosscaps is None):
        raise click.UsageError("give exactly one of --orientable or --nonorientable")
    try:
        spec = GroupSpec.parse(group)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint='--group')
    kind = SurfaceKind(True, genus) if genus is not None else SurfaceKind(False, crosscaps)
    presentation = canonical_presentation(kind)
    dimension = expected_dimension(spec, kind)

    random_file = None
    if seed is not None:
        rep = random_surface_representation(spec, kind, seed)
        random_file = format_representation(rep, header=f"random representation, seed {seed}")

    if fmt == 'json':
        data = {
            'surface': kind.describe(),
            'euler_characteristic': kind.euler_characteristic,
            'group': spec.label,
            'presentation': presentation.format(),
            'expected_dimension': dimension,
        }
        if random_file is not None:
            data['random_representation'] = random_file
        _emit(canonical_json(data), out)
        return
    text = (f"# {kind.describe()}, Euler characteristic {kind.euler_characteristic}\n"
            f"{presentation.format()}\n"
            f"expected dimension over {spec.label}: {dimension}\n")
    if random_file is not None:
        text += '\n' + random_file
    _emit(text, out)


@cli.command()
@input_argument
@tol_option
@format_option
@out_option
@handle_errors
def cover(path, tol, fmt, out):
    """Orientation double cover: H^0 decomposition, duality dimensions and isotropy."""
    tolerances = _tolerances(tol)
    doc = parse_document(_read(path))
    rep = doc.representation()
    report = orientation_double_cover(rep, tolerances)
    lagrangian = lagrangian_check(rep, doc.cover_presentation(), doc.embedding_words(), tolerances)
    if fmt == 'json':
        _emit(canonical_json({'cover': report.to_dict(), 'lagrangian': lagrangian.to_dict()}), out)
    else:
        _emit(cover_to_text(report, lagrangian), out)


@cli.command()
@input_argument
@tol_option
@click.option('--format', 'fmt', type=click.Choice(['text', 'csv', 'json']), default='text',
              show_default=True)
@out_option
@click.option('--workers', type=int, default=None, help='Worker threads for the grid.')
@handle_errors
def scan(path, tol, fmt, out, workers):
    """Betti numbers along a one-parameter family and the samples where they jump."""
    tolerances = _tolerances(tol)
    doc = parse_document(_read(path))
    result = scan_family(doc.family(), tolerances, workers)
    if fmt == 'csv':
        _emit(scan_to_csv(result), out)
    elif fmt == 'json':
        _emit(canonical_json(scan_to_dict(result)), out)
    else:
        _emit(scan_to_text(result), out)


@cli.command()
@input_argument
@tol_option
@format_option
@out_option
@click.option('--gram', is_flag=True, help='Gram matrix of the pairing on a basis of H^1 and its rank.')
@click.option('--alpha', default=None, help='Label of the first cocycle (default: first declared).')
@click.option('--beta', default=None, help='Label of the second cocycle (default: second declared).')
@handle_errors
def pairing(path, tol, fmt, out, gram, alpha, beta):
    """Cup product pairing of two cocycles, or its Gram rank on H^1."""
    tolerances = _tolerances(tol)
    doc = parse_document(_read(path))
    rep = doc.representation()
    if gram:
        result = h1_pairing(rep, tolerances)
        if fmt == 'json':
            _emit(canonical_json(pairing_to_dict(result)), out)
        else:
            _emit(f"dim H1 = {result.h1_dim}\nGram rank = {result.gram_rank}\n"
                  f"antisymmetry residual = {result.antisymmetry_residual:.3g}\n", out)
        return

    labels = list(doc.cocycles)
    alpha = alpha or (labels[0] if labels else None)
    beta = beta or (labels[1] if len(labels) > 1 else None)
    if alpha is None or beta is None:
        raise click.UsageError("the file declares fewer than two cocycles; pass --gram or add cocycles")
    value = cup_pairing(rep, doc.cocycle(alpha), doc.cocycle(beta), tolerances)
    if fmt == 'json':
        _emit(canonical_json({'alpha': alpha, 'beta': beta, 'value': complex_pair(value),
                              'normalization': 'unnormalized'}), out)
    else:
        _emit(f"omega({alpha}, {beta}) = {value.real!r}{value.imag:+}i\n", out)


if __name__ == '__main__':
    cli()
