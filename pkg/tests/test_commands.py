# -*- coding: utf-8 -*-

import json
import os

import pytest

from qamean.commands import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main, parse_args
from qamean.compare import ComparisonVerdict, Method, Relation

__author__ = "Moshe Malawach"
__copyright__ = "Moshe Malawach"
__license__ = "mit"

DATA = os.path.join(os.path.dirname(__file__), os.pardir, 'data')


@pytest.mark.parametrize('gen, vec, expected', [
    ('power:1', '3,7', 5.0),
    ('power:2', '1,7', 5.0),
    ('log', '2,8', 4.0),
    ('power:-1', '1,3', 1.5),
])
def test_eval(capsys, gen, vec, expected):
    assert main(['eval', '--gen', gen, '--vec', vec]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(expected, rel=1e-12)


def test_eval_out_of_domain(capsys):
    assert main(['eval', '--gen', 'power:2', '--vec', '0.5,2']) == EXIT_INPUT
    assert capsys.readouterr().out == ''


def test_eval_bad_generator():
    assert main(['eval', '--gen', 'cosh:2', '--vec', '1,2']) == EXIT_INPUT


def test_compare(capsys):
    assert main(['compare', '--f', 'power:1', '--g', 'power:2']) == EXIT_OK
    output = json.loads(capsys.readouterr().out)
    assert output['relation'] == 'LEQ'
    assert {v['method'] for v in output['verdicts']} == {'ratio', 'convexity', 'empirical'}


def test_compare_single_method(capsys):
    assert main(['compare', '--f', 'exp:2', '--g', 'power:1', '--method', 'ratio']) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['relation'] == 'GEQ'


def test_sup_both_pathways(capsys, tmp_path):
    family = os.path.join(DATA, 'powers_1_2.json')
    assert main(['-o', str(tmp_path), 'sup', '--family', family]) == EXIT_OK
    output = json.loads(capsys.readouterr().out)
    assert output['certified']
    assert output['cross_distance'] < 1e-5
    assert set(output['results']) == {'c1', 'c2'}
    assert (tmp_path / 'sup_c2.csv').exists()
    assert (tmp_path / 'sup_c1.csv').exists()


def test_inf_single_pathway(capsys, tmp_path):
    family = os.path.join(DATA, 'exponentials_1_2.json')
    assert main(['-o', str(tmp_path), 'inf', '--family', family, '--pathway', 'c1']) == EXIT_OK
    output = json.loads(capsys.readouterr().out)
    assert 'cross_distance' not in output
    assert output['results']['c1']['certified']


def test_missing_family(tmp_path):
    assert main(['-o', str(tmp_path), 'sup', '--family', str(tmp_path / 'none.json')]) == EXIT_INPUT


@pytest.mark.parametrize('pathway', ['c2', 'c1'])
def test_anchor_outside_the_interval(tmp_path, pathway):
    family = os.path.join(DATA, 'powers_1_2.json')
    args = ['-o', str(tmp_path), 'sup', '--family', family, '--anchor', '50', '--pathway', pathway]
    assert main(args) == EXIT_INPUT


@pytest.mark.parametrize('interval', [[3, 1], [1, 1], [1], 'wide'])
def test_family_with_a_bad_interval(tmp_path, interval):
    family = tmp_path / 'family.json'
    family.write_text(json.dumps({'interval': interval, 'generators': ['power:1', 'power:2']}))
    assert main(['-o', str(tmp_path), 'sup', '--family', str(family)]) == EXIT_INPUT


def test_regularize(capsys, tmp_path):
    gen = os.path.join(DATA, 'desk_kink.json')
    assert main(['--interval', '0.5,2', '-o', str(tmp_path), 'regularize', '--gen', gen]) == EXIT_OK
    output = json.loads(capsys.readouterr().out)
    assert output['steps'] == 1
    assert output['certified'] is True
    assert output['kinks_remaining'] == [1, 0]
    assert output['pal91_distances'][-1] == 0.0
    trace = json.loads((tmp_path / 'regularize_trace.json').read_text())
    assert trace['direction'] == 'upper'
    assert trace['certified'] is True
    assert len(trace['mean_growth']) == 1
    assert (tmp_path / 'regularized.csv').exists()



def test_regularize_without_mean_growth_fails(capsys, tmp_path, monkeypatch):
    def shrinking(f, g, **kwargs):
        return ComparisonVerdict(relation=Relation.GEQ, method=Method.empirical, margin=1.0)

    monkeypatch.setattr('qamean.regularize.compare_empirical', shrinking)
    gen = os.path.join(DATA, 'desk_kink.json')
    assert main(['--interval', '0.5,2', '-o', str(tmp_path), 'regularize', '--gen', gen]) == EXIT_FAILED
    assert json.loads(capsys.readouterr().out)['certified'] is False
    trace = json.loads((tmp_path / 'regularize_trace.json').read_text())
    assert trace['certified'] is False

def test_regularize_wrong_direction(tmp_path):
    gen = os.path.join(DATA, 'desk_kink.json')
    args = ['--interval', '0.5,2', '-o', str(tmp_path), 'regularize', '--gen', gen]
    assert main(args + ['--direction', 'lower']) == EXIT_INPUT
    assert main(args + ['--direction', 'both']) == EXIT_INPUT


def test_verify(capsys):
    assert main(['--grid-n', '1025', 'verify', '--suite', 'regularize']) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report['suite'] == 'regularize'
    assert report['checks']



def test_verify_uses_configured_tolerances(capsys, tmp_path):
    settings = tmp_path / 'settings.yaml'
    settings.write_text("run:\n  tolerances:\n    tol_eq: 2.0e-9\n")
    assert main(['-c', str(settings), '--grid-n', '1025', 'verify', '--suite', 'regularize']) == EXIT_OK
    checks = json.loads(capsys.readouterr().out)['checks']
    limits = {check['name']: check['limit'] for check in checks}
    assert limits['kink orders give equivalent limits'] == 2e-9


@pytest.mark.parametrize('flags', [['--grid-n', '1000'], ['--interval', '3,1']])
def test_invalid_run_flags(flags):
    assert main(flags + ['eval', '--gen', 'power:1', '--vec', '2,3']) == EXIT_INPUT


def test_parse_args():
    args = parse_args(['-vv', '--seed', '3', 'sup', '--family', 'f.json', '--pathway', 'c2'])
    assert args.command == 'sup'
    assert args.pathway == 'c2'
    assert args.seed == 3
    with pytest.raises(SystemExit):
        parse_args(['eval', '--gen', 'power:1', '--vec', 'a,b'])
    with pytest.raises(SystemExit):
        parse_args([])


def test_failed_exit_code_is_distinct():
    assert EXIT_FAILED not in (EXIT_OK, EXIT_INPUT)


def test_run_flags_after_the_subcommand(capsys):
    args = ['compare', '--f', 'power:1', '--g', 'power:2', '--interval', '1,10', '--method', 'all']
    assert main(args) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['relation'] == 'LEQ'
    assert parse_args(['--seed', '5', 'verify']).seed == 5
    assert parse_args(['verify', '--seed', '6']).seed == 6
    assert parse_args(['eval', '--gen', 'log', '--vec', '2,8']).interval is None
