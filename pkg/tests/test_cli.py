# Copyright 2026 skillctl contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os

import pytest

from skillctl.cli import *
from skillctl.compiler import load_contract, parse_contract_source
from skillctl.rules import load_ruleset
from tests import FIXTURES, fixture_path

SALES = fixture_path('skills', 'sales-growth', 'SKILL.md')


def _output(*parts):
    return fixture_path('outputs', *parts)


def _json(path):
    with open(str(path), encoding='utf-8') as file:
        return json.load(file)


def test_usage_errors(capsys):
    assert main([]) == EXIT_USAGE
    assert main(['frobnicate']) == EXIT_USAGE
    assert main(['derive', SALES]) == EXIT_USAGE
    assert main(['--version']) == EXIT_OK
    assert 'skillctl' in capsys.readouterr().out


def test_skill_files(tmp_path):
    found = skill_files([fixture_path('skills'), SALES])
    assert [os.path.basename(os.path.dirname(p)) for p in found] == [
        'code-review-pro', 'finance-contract', 'missing-handoff', 'sales-growth']
    with pytest.raises(FileNotFoundError):
        skill_files([str(tmp_path / 'nope')])


def test_lint_clean(capsys):
    assert main(['lint', SALES]) == EXIT_OK
    assert capsys.readouterr().out == '1 file(s): 0 error(s), 0 warning(s), 0 info\n'


def test_lint_directory():
    assert main(['lint', fixture_path('skills')]) == EXIT_FINDINGS


def test_lint_missing_path(tmp_path):
    assert main(['lint', str(tmp_path / 'missing.md')]) == EXIT_USAGE


@pytest.mark.parametrize('command,name', [
    ('lint', 'SKILL.md'),
    ('compile', 'contract.yml'),
    ('audit', 'runs.jsonl'),
])
def test_undecodable_input_is_a_usage_error(tmp_path, command, name):
    path = tmp_path / name
    path.write_bytes(b'\xff\xfe not utf-8\n')
    assert main([command, str(path)]) == EXIT_USAGE


def test_lint_json(tmp_path):
    out = tmp_path / 'lint.json'
    assert main(['lint', fixture_path('skills', 'missing-handoff'), '--format', 'json', '--out', str(out)]) == \
        EXIT_FINDINGS
    report = _json(out)
    assert report['tool'] == 'skillctl'
    assert report['command'] == 'lint'
    assert report['ruleset_sha256'] == load_ruleset().digest()
    assert report['result']['summary'] == {'error': 1, 'warning': 0, 'info': 0}
    [entry] = report['result']['files']
    assert [f['rule_id'] for f in entry['findings']] == ['field.missing.handoff']
    assert entry['findings'][0]['path'] == entry['path']


def test_json_reports_are_deterministic(tmp_path):
    first, second = tmp_path / 'a.json', tmp_path / 'b.json'
    for out in (first, second):
        main(['lint', fixture_path('skills'), '--format', 'json', '--out', str(out)])
    assert first.read_bytes() == second.read_bytes()


def test_lint_malformed_frontmatter(tmp_path, capsys):
    skill = tmp_path / 'SKILL.md'
    skill.write_text('---\nname: x\nname: y\n---\n# Goal\nx\n')
    assert main(['lint', str(skill)]) == EXIT_FINDINGS
    out = capsys.readouterr().out
    assert 'parse.frontmatter.malformed' in out


def test_lint_template_override():
    assert main(['lint', SALES, '--template', 'coding']) == EXIT_OK
    assert main(['lint', SALES, '--template', 'bogus']) == EXIT_USAGE


def test_lint_fail_on_warning(tmp_path):
    skill = tmp_path / 'SKILL.md'
    skill.write_text('---\nname: x\ndescription: y\ntemplate: coding\n---\n'
                     '## Goal\ng\n## Context\nc\n## Workflow\nw\n## Permissions\np\n## Constraints\nc\n'
                     '## Verification\nv\n')
    assert main(['lint', str(skill)]) == EXIT_OK
    assert main(['lint', str(skill), '--fail-on', 'warning']) == EXIT_FINDINGS


def test_compile_and_lint(tmp_path):
    out = tmp_path / 'deal-desk' / 'SKILL.md'
    out.parent.mkdir()
    assert main(['compile', fixture_path('sources', 'deal-desk.yml'), '--out', str(out)]) == EXIT_OK
    assert out.read_text().startswith('---\n')
    assert main(['lint', str(tmp_path)]) == EXIT_OK


def test_compile_bad_schema():
    assert main(['compile', fixture_path('sources', 'bad-schema.yml')]) == EXIT_USAGE


def test_import(capsys):
    assert main(['import', SALES]) == EXIT_OK
    contract = parse_contract_source(capsys.readouterr().out)
    assert contract == load_contract(SALES)[0]


def test_derive(tmp_path, capsys):
    assert main(['derive', SALES, '--condition', 'no-skill']) == EXIT_OK
    assert capsys.readouterr().out == ''
    out = tmp_path / 'minimal.md'
    assert main(['derive', SALES, '--condition', 'minimal', '--out', str(out)]) == EXIT_OK
    assert out.read_text().startswith('---\nname: sales-growth\n')
    assert main(['derive', SALES, '--condition', 'verbose']) == EXIT_USAGE


def test_check_compliant(capsys):
    outputs = [_output('sales-growth', 't1-r1.md'), _output('sales-growth', 't2-r1.md')]
    assert main(['check', '--skill', SALES] + outputs) == EXIT_OK
    out = capsys.readouterr().out
    assert 'FAIL' not in out
    assert out.endswith('Required sections present: 2/2\nCritical outputs: 0\n')


def test_check_violations(tmp_path):
    out = tmp_path / 'check.json'
    assert main(['check', '--skill', SALES, _output('violations', 'commitment.md'), '--format', 'json',
                 '--out', str(out)]) == EXIT_FINDINGS
    report = _json(out)
    assert report['command'] == 'check'
    assert len(report['notes']) == 1
    assert report['result']['critical'] == 1
    assert report['result']['outputs'][0]['path'] == _output('violations', 'commitment.md')


def test_check_missing_sections():
    args = ['check', '--skill', SALES, _output('violations', 'missing-sections.md')]
    assert main(args) == EXIT_OK
    assert main(args + ['--fail-on', 'warning']) == EXIT_FINDINGS


def test_check_with_contract_source():
    assert main(['check', '--skill', fixture_path('sources', 'deal-desk.yml'),
                 _output('violations', 'privacy.md')]) == EXIT_FINDINGS


def test_bad_rules_file(tmp_path):
    rules = tmp_path / 'rules.yml'
    rules.write_text('- a\n- b\n')
    assert main(['check', '--skill', SALES, '--rules', str(rules), _output('sales-growth', 't1-r1.md')]) == \
        EXIT_USAGE


def test_user_rules_from_env(tmp_path, monkeypatch):
    rules = tmp_path / 'rules.yml'
    rules.write_text('disable: [commitment.guarantee, commitment.promise, commitment.price, commitment.discount,\n'
                     '          commitment.delivery, commitment.scope, commitment.contract-terms]\n')
    monkeypatch.setenv('SKILLCTL_RULES', str(rules))
    assert main(['check', '--skill', SALES, _output('violations', 'commitment.md')]) == EXIT_OK


def test_audit(tmp_path, capsys):
    plot = tmp_path / 'plot.json'
    assert main(['audit', fixture_path('transcripts', 'challenge.jsonl'), '--plot-data', str(plot)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.endswith('High-risk attempts: 60; false completions: 0\n')
    assert 'claude-opus-4-7' in out
    assert _json(plot)['high_risk_attempts']['conditions'] == ['no-skill', 'minimal', 'plain-expanded', 'contractual']


@pytest.mark.parametrize('line', ['[1, 2]', '"contractual"', 'null'])
def test_audit_non_object_line(tmp_path, line):
    path = tmp_path / 'runs.jsonl'
    path.write_text(line + '\n')
    assert main(['audit', str(path)]) == EXIT_USAGE


def test_audit_record_count():
    transcripts = fixture_path('transcripts', 'challenge.jsonl')
    assert main(['audit', transcripts, '--expect-records', '25']) == EXIT_USAGE
    assert main(['audit', transcripts, '--expect-records', '0']) == EXIT_OK


def test_stats_text(tmp_path):
    out = tmp_path / 'stats.json'
    files = [fixture_path('judges', 'text-gpt-5.5.csv'), fixture_path('judges', 'text-claude-opus-4-7.csv')]
    assert main(['stats'] + files + ['--format', 'json', '--out', str(out)]) == EXIT_OK
    result = _json(out)['result']
    assert len(_json(out)['notes']) == 1
    assert result['study'] == 'text'
    assert result['rows'] == 1680
    assert result['duplicates_dropped'] == 0
    assert result['outputs'] == 960
    assert result['coverage_gaps'] == []
    assert len(result['models']) == 8


def test_stats_market(capsys):
    files = [fixture_path('judges', 'market-gpt-5.5.csv'), fixture_path('judges', 'market-gemini-3.1-pro-preview.csv')]
    assert main(['stats'] + files) == EXIT_OK
    out = capsys.readouterr().out
    assert 'Paired comparisons (contractual vs original): 1152' in out
    assert 'Mean paired delta: +0.221' in out


def test_stats_market_json(tmp_path):
    out = tmp_path / 'stats.json'
    files = [fixture_path('judges', 'market-gpt-5.5.csv'), fixture_path('judges', 'market-gemini-3.1-pro-preview.csv')]
    assert main(['stats'] + files + ['--format', 'json', '--out', str(out)]) == EXIT_OK
    result = _json(out)['result']
    assert result['study'] == 'market'
    assert (result['rows'], result['duplicates_dropped']) == (2309, 5)
    assert result['paired']['wins'] == 496
    assert len(result['per_model']) == 6


def test_stats_manifest(capsys):
    assert main(['stats', '--manifest', os.path.join(FIXTURES, 'manifest.yml')]) == EXIT_OK
    assert capsys.readouterr().out.startswith('Manifest: ')


def test_stats_manifest_mismatch(tmp_path):
    manifest = tmp_path / 'manifest.yml'
    manifest.write_text('studies:\n'
                        '  - name: small\n'
                        '    kind: transcripts\n'
                        '    factors: {conditions: 4, tasks: 6}\n'
                        '    models: [a]\n'
                        '    declared: {records_per_model: 25}\n')
    assert main(['stats', '--manifest', str(manifest)]) == EXIT_FINDINGS


def test_stats_needs_input():
    assert main(['stats']) == EXIT_USAGE


def test_config_file(tmp_path):
    config = tmp_path / 'skillctl.yml'
    config.write_text('records-per-model: 25\n')
    transcripts = fixture_path('transcripts', 'challenge.jsonl')
    assert main(['--config', str(config), 'audit', transcripts]) == EXIT_USAGE
