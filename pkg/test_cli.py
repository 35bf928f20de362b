"""Tests for the charvar command line interface
"""
import csv
import io
import json
import logging
from pathlib import Path

import pytest
from click.testing import CliRunner

from cli import cli
from config import __version__
from input_parser import parse_document
from rep import validate_representation


SCHEMA = Path(__file__).parent / 'schema' / 'analysis_report.v1.json'


@pytest.fixture(autouse=True)
def detach_log_handlers():
    """Each invocation installs handlers on the root logger bound to the runner streams"""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_charvar', False):
            root.removeHandler(handler)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def run(runner, data_dir, tmp_path):
    """Invoke a command on a data file, writing the report to a temporary file"""

    def invoke(command, name, *args):
        out = tmp_path / f'{command}.out'
        result = runner.invoke(cli, [command, str(data_dir / name), '--out', str(out), *args])
        return result, (out.read_text(encoding='utf-8') if out.exists() else None)

    return invoke


class TestAnalyze:

    def test_klein_simple(self, run):
        result, text = run('analyze', 'klein_simple.txt')
        assert result.exit_code == 0
        report = json.loads(text)
        assert report['schema'] == 'charvar.analysis_report.v1'
        assert report['tool'] == {'name': 'charvar', 'version': __version__}
        coh = report['cohomology']
        assert (coh['b0'], coh['b1'], coh['b2']) == (0, 1, 1)
        assert (coh['rank_d1'], coh['rank_d2']) == (3, 2)
        assert coh['b2_status'] == 'exact_single_relator'
        assert coh['euler'] == 0
        assert len(report['input']['matrix_digest']) == 64
        cls = report['classification']
        assert cls['good'] == 'yes'
        assert cls['smooth_verdict'] == 'not_determined'
        assert report['rank_theorem']['implied_hom_dim'] == 3
        assert report['warnings'] == []

    def test_report_keys_follow_schema(self, run):
        _, text = run('analyze', 'quaternion_genus2.txt')
        report = json.loads(text)
        schema = json.loads(SCHEMA.read_text(encoding='utf-8'))
        assert set(report) == set(schema['required'])
        for section in ('input', 'cohomology', 'classification', 'rank_theorem'):
            assert set(schema['properties'][section]['required']) <= set(report[section])

    def test_byte_identical_reruns(self, runner, data_dir, tmp_path):
        outputs = []
        for k in range(2):
            out = tmp_path / f'run{k}.json'
            result = runner.invoke(cli, ['analyze', str(data_dir / 'psl_crosscaps3.txt'), '--out', str(out)])
            assert result.exit_code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_psl_crosscaps3(self, run):
        _, text = run('analyze', 'psl_crosscaps3.txt')
        report = json.loads(text)
        assert report['cohomology']['b1'] == 3
        assert report['classification']['smooth_verdict'] == 'smooth'
        assert report['classification']['projective_stabilizer_order'] == 2
        assert report['classification']['good'] == 'no'
        assert any('center' in w for w in report['warnings'])

    def test_text_format(self, run):
        result, text = run('analyze', 'klein_h2.txt', '--format', 'text')
        assert result.exit_code == 0
        assert 'b0 = 1   b1 = 1   b2 = 0' in text
        assert 'SL(2,C)' in text

    def test_family_at_fixed_t(self, run):
        result, text = run('analyze', 'crosscaps4_family.txt', '--t', '0.5')
        assert result.exit_code == 0
        assert json.loads(text)['cohomology']['b2'] == 1

    def test_non_finite_t_rejected(self, run):
        result, text = run('analyze', 'crosscaps4_family.txt', '--t', 'nan')
        assert result.exit_code == 2
        assert text is None

    def test_family_without_t_does_not_parse(self, run):
        result, _ = run('analyze', 'crosscaps4_family.txt')
        assert result.exit_code == 1

    def test_invalid_representation(self, run):
        result, text = run('analyze', 'klein_invalid.txt')
        assert result.exit_code == 2
        assert text is None

    def test_malformed_input(self, run):
        result, _ = run('analyze', 'klein_malformed.txt')
        assert result.exit_code == 1

    def test_bad_tolerance(self, run):
        result, _ = run('analyze', 'klein_simple.txt', '--tol', '0')
        assert result.exit_code == 2

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ['analyze', str(tmp_path / 'absent.txt')])
        assert result.exit_code == 2


class TestSurface:

    def test_orientable(self, runner):
        result = runner.invoke(cli, ['surface', '--orientable', '2'])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data['expected_dimension'] == 6
        assert data['euler_characteristic'] == -2
        assert data['presentation'].startswith('gens a1 b1 a2 b2')

    def test_nonorientable_text(self, runner):
        result = runner.invoke(cli, ['surface', '--nonorientable', '3', '--format', 'text'])
        assert result.exit_code == 0
        assert 'rel x1^2 x2^2 x3^2' in result.output
        assert 'expected dimension over SL(2,C): 3' in result.output

    def test_general_linear(self, runner):
        result = runner.invoke(cli, ['surface', '--orientable', '2', '--group', 'GL(2,C)'])
        assert json.loads(result.output)['expected_dimension'] == 10

    def test_out_of_range(self, runner):
        result = runner.invoke(cli, ['surface', '--nonorientable', '2'])
        assert result.exit_code == 2

    def test_exactly_one_kind(self, runner):
        assert runner.invoke(cli, ['surface']).exit_code == 2
        assert runner.invoke(cli, ['surface', '--orientable', '2', '--nonorientable', '3']).exit_code == 2

    def test_seeded_representation_loads(self, runner):
        result = runner.invoke(cli, ['surface', '--nonorientable', '3', '--seed', '7'])
        assert result.exit_code == 0
        text = json.loads(result.output)['random_representation']
        rep = parse_document(text).representation()
        assert validate_representation(rep).accepted


class TestCover:

    def test_klein_simple(self, run):
        result, text = run('cover', 'klein_simple.txt')
        assert result.exit_code == 0
        data = json.loads(text)
        assert (data['cover']['h0_cover'], data['cover']['h1_cover']) == (1, 2)
        assert data['cover']['decomposition_ok']
        assert data['lagrangian']['isotropy_checked']
        assert data['lagrangian']['isotropic']

    def test_text(self, run):
        _, text = run('cover', 'klein_trivial.txt', '--format', 'text')
        assert 'h0_cover = 3' in text
        assert 'decomposition 3 = 3 + 0  ok' in text

    def test_orientable_input_rejected(self, run):
        result, _ = run('cover', 'quaternion_genus2.txt')
        assert result.exit_code == 2


class TestScan:

    def test_csv(self, run):
        result, text = run('scan', 'crosscaps4_family.txt', '--format', 'csv')
        assert result.exit_code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert [r['b1'] for r in rows] == ['6', '7', '6', '7', '6']
        assert [r['b0'] for r in rows] == ['0', '1', '0', '0', '0']
        assert 'cover_stabilizer_order' in rows[0]
        assert text.splitlines()[0] == 't,b0,b1,b2,simple,reductive,warnings,cover_stabilizer_order'

    def test_text_marks_jumps(self, run):
        _, text = run('scan', 'crosscaps4_family.txt', '--workers', '2')
        assert text.count('jump') >= 2
        assert 'Betti jump at t = 0, 0.5' in text

    def test_json(self, run):
        _, text = run('scan', 'psl_crosscaps3_family.txt', '--format', 'json')
        data = json.loads(text)
        assert [r['cover_stabilizer_order'] for r in data['rows']] == [2, 4, 2]
        assert data['jumps'] == []

    def test_needs_grid(self, run):
        result, _ = run('scan', 'klein_simple.txt')
        assert result.exit_code == 1


class TestPairing:

    def test_gram(self, run):
        result, text = run('pairing', 'quaternion_genus2.txt', '--gram')
        assert result.exit_code == 0
        data = json.loads(text)
        assert data['h1_dim'] == 6
        assert data['gram_rank'] == 6
        assert data['nondegenerate']

    def test_declared_cocycles(self, run):
        result, text = run('pairing', 'quaternion_genus2.txt')
        assert result.exit_code == 0
        data = json.loads(text)
        assert (data['alpha'], data['beta']) == ('alpha', 'beta')
        assert len(data['value']) == 2

    def test_swapped_labels_negate(self, run):
        _, forward = run('pairing', 'quaternion_genus2.txt', '--alpha', 'alpha', '--beta', 'beta')
        _, backward = run('pairing', 'quaternion_genus2.txt', '--alpha', 'beta', '--beta', 'alpha')
        a = json.loads(forward)['value']
        b = json.loads(backward)['value']
        assert a[0] == pytest.approx(-b[0], abs=1e-10)
        assert a[1] == pytest.approx(-b[1], abs=1e-10)

    def test_no_cocycles(self, run):
        result, _ = run('pairing', 'klein_simple.txt')
        assert result.exit_code == 2


class TestGlobalOptions:

    def test_version(self, runner):
        result = runner.invoke(cli, ['--version'])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_run_log(self, runner, data_dir, tmp_path):
        log_dir = tmp_path / 'logs'
        result = runner.invoke(cli, ['-v', '--log-dir', str(log_dir), 'analyze',
                                     str(data_dir / 'klein_simple.txt'), '--out', str(tmp_path / 'r.json')])
        assert result.exit_code == 0
        files = list(log_dir.glob('charvar_*.log'))
        assert len(files) == 1
        entries = [json.loads(line) for line in files[0].read_text(encoding='utf-8').splitlines()]
        assert any(e['logger'] == 'cohomology' for e in entries)
