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

""" Command-line entry point: `skillctl <command> ...`.

Exit codes are the same for every command: 0 when nothing at or above the failure threshold was found, 1 when
error findings, critical checks, false completions or manifest mismatches were found, 2 for usage and I/O failures.
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import logzero
import yaml
from logzero import logger

from skillctl import __version__
from skillctl.checker import compile_output_contract, check_output
from skillctl.compiler import Condition, derive_condition, emit_contract_source, emit_skill, import_skill, \
    load_contract, parse_contract_source
from skillctl.config import Config
from skillctl.contract import TemplateVariant, validate_contract
from skillctl.errors import MalformedFrontmatter, SkillctlError
from skillctl.findings import Finding, Severity, has_severity, sort_findings
from skillctl.metrics.aggregate import QUALITY, condition_means, cross_judge_aggregate, paired_deltas, \
    per_model_deltas, variant_stats
from skillctl.metrics.manifest import experiment_arithmetic_check, load_manifest
from skillctl.metrics.records import dedup_records, read_judge_records
from skillctl.metrics.tables import condition_table, paired_summary, plot_data, variant_table
from skillctl.report import build_report, dump_json, emit
from skillctl.rules import load_ruleset
from skillctl.skill_doc import parse_skill_markdown, render_skill_markdown
from skillctl.tools.audit import aggregate_audits, audit_transcript
from skillctl.tools.registry import load_registry
from skillctl.tools.transcript import read_transcripts

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2

SKILL_FILE = 'SKILL.md'
TEXT_STUDY = 'text'
MARKET_STUDY = 'market'


def _read(path):
    with open(path, encoding='utf-8') as file:
        return file.read()


def _write(path, text):
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        file.write(text)


def _threshold(args):
    return Severity(args.fail_on)


def _template(args):
    """
    :return: Optional[TemplateVariant]; The --template override, None when not given.
    :raises SkillctlError: Unknown variant name.
    """
    if not args.template:
        return None
    variant = TemplateVariant.parse(args.template)
    if variant is None:
        raise SkillctlError('Unknown template variant: {}'.format(args.template))
    return variant


def _report(args, command, result, ruleset=None, text=None, notes=()):
    if args.format == 'json':
        emit(dump_json(build_report(command, result, ruleset, notes)), args.out)
    else:
        emit(text or '', args.out)


def skill_files(paths):
    """
    Expand the command line paths: files are taken as given, directories are searched for SKILL.md files.
    :param paths: Iterable[str]
    :return: List[str]; Sorted, without duplicates.
    :raises FileNotFoundError: A path does not exist.
    """
    found = set()
    for path in paths:
        if os.path.isdir(path):
            for (root, _, files) in os.walk(path):
                if SKILL_FILE in files:
                    found.add(os.path.join(root, SKILL_FILE))
        elif os.path.isfile(path):
            found.add(path)
        else:
            raise FileNotFoundError('No such file or directory: {}'.format(path))
    return sorted(found)


def lint_file(path, ruleset, variant=None):
    """
    Parse, import and validate one SKILL.md file.
    :param path: str; File to lint.
    :param ruleset: RuleSet; Supplies the heading alias table.
    :param variant: Optional[TemplateVariant]; Override of the template named in the frontmatter.
    :return: List[Finding]; Sorted, with `path` filled in.
    """
    try:
        doc = parse_skill_markdown(_read(path))
    except MalformedFrontmatter as err:
        line = err.line or 1
        return [Finding.make('parse.frontmatter.malformed', err.message, location=(line, line)).with_path(path)]
    contract, findings = import_skill(doc, ruleset.alias_table())
    findings = list(findings) + validate_contract(contract, variant)
    logger.debug('%s: %d finding(s)', path, len(findings))
    return sort_findings(f.with_path(path) for f in findings)


def cmd_lint(args):
    ruleset = load_ruleset(args.rules)
    variant = _template(args)
    files = skill_files(args.paths)
    with ThreadPoolExecutor(max_workers=max(1, int(Config()['jobs']))) as pool:
        per_file = list(pool.map(lambda p: lint_file(p, ruleset, variant), files))

    findings = [f for group in per_file for f in group]
    counts = {s.value: sum(1 for f in findings if f.severity is s) for s in Severity}
    logger.info('Linted %d skill file(s)', len(files))
    text = ''.join(str(f) + '\n' for f in findings)
    text += '{} file(s): {} error(s), {} warning(s), {} info\n'.format(
        len(files), counts['error'], counts['warning'], counts['info'])
    result = {
        'files': [{'path': p, 'findings': [f.serialize() for f in group]} for (p, group) in zip(files, per_file)],
        'summary': counts,
    }
    _report(args, 'lint', result, ruleset, text)
    return EXIT_FINDINGS if has_severity(findings, _threshold(args)) else EXIT_OK


def cmd_compile(args):
    contract = parse_contract_source(_read(args.source))
    errors = [f for f in validate_contract(contract) if f.severity is Severity.ERROR]
    if errors:
        logger.warning('%s has %d validation error(s); run `skillctl lint` on the result', args.source, len(errors))
    text = render_skill_markdown(emit_skill(contract))
    if args.out:
        _write(args.out, text)
        logger.info('Wrote %s', args.out)
    else:
        emit(text)
    return EXIT_OK


def cmd_import(args):
    ruleset = load_ruleset(args.rules)
    contract, findings = import_skill(parse_skill_markdown(_read(args.skill)), ruleset.alias_table())
    for finding in findings:
        logger.info('%s', finding.with_path(args.skill))
    text = emit_contract_source(contract)
    if args.out:
        _write(args.out, text)
        logger.info('Wrote %s', args.out)
    else:
        emit(text)
    return EXIT_OK


def cmd_derive(args):
    ruleset = load_ruleset(args.rules)
    condition = Condition.parse(args.condition)
    if condition is None:
        raise SkillctlError('Unknown condition: {}'.format(args.condition))
    contract, _ = load_contract(args.skill, ruleset.alias_table())
    doc = derive_condition(contract, condition)
    if doc is None:
        logger.info('The %s condition has no skill body; nothing written', condition.value)
        return EXIT_OK
    if condition is Condition.PLAIN_EXPANDED:
        logger.info('The plain-expanded body is derived mechanically from the contract')
    text = render_skill_markdown(doc)
    if args.out:
        _write(args.out, text)
        logger.info('Wrote %s', args.out)
    else:
        emit(text)
    return EXIT_OK


def cmd_check(args):
    ruleset = load_ruleset(args.rules)
    contract, findings = load_contract(args.skill, ruleset.alias_table())
    findings = list(findings)
    if args.template:
        findings.extend(validate_contract(contract, _template(args)))
    oc = compile_output_contract(contract, ruleset, findings)
    for finding in findings:
        if finding.severity is not Severity.INFO:
            logger.warning('%s', finding.with_path(args.skill))

    reports = [(path, check_output(_read(path), oc, ruleset)) for path in sorted(args.outputs)]
    failed = any(r.critical for (_, r) in reports)
    if _threshold(args) is Severity.WARNING:
        failed = failed or any(r.summary['failed'] for (_, r) in reports)
    sections_pass = sum(1 for (_, r) in reports if r.sections_pass)

    lines = []
    for (path, report) in reports:
        for result in report.results:
            lines.append('{} {} {}'.format(path, 'PASS' if result.passed else 'FAIL', result.assertion_id))
            for detail in result.details:
                where = ':{}:{}'.format(*detail.location) if detail.location else ''
                lines.append('    {}{} {}{}'.format(detail.rule_id or '-', where, detail.text,
                                                    ' (mitigated)' if detail.mitigated else ''))
    lines.append('Required sections present: {}/{}'.format(sections_pass, len(reports)))
    lines.append('Critical outputs: {}'.format(sum(1 for (_, r) in reports if r.critical)))
    result = {
        'skill': args.skill,
        'outputs': [dict(report.serialize(), path=path) for (path, report) in reports],
        'sections_pass': sections_pass,
        'critical': sum(1 for (_, r) in reports if r.critical),
    }
    _report(args, 'check', result, ruleset, '\n'.join(lines) + '\n', notes=('checker',))
    return EXIT_FINDINGS if failed else EXIT_OK


def cmd_audit(args):
    ruleset = load_ruleset(args.rules)
    registry = load_registry(args.registry)
    transcripts = [t for path in sorted(args.transcripts) for t in read_transcripts(path)]
    reports = [audit_transcript(t, registry, ruleset) for t in transcripts]
    matrix = aggregate_audits(reports, args.expect_records)
    false_completions = sum(1 for r in reports if r.false_completion)
    text = matrix.render() + 'High-risk attempts: {}; false completions: {}\n'.format(
        sum(r.high_risk_attempts for r in reports), false_completions)
    result = {
        'reports': [r.serialize() for r in sorted(reports, key=lambda r: r.run_id)],
        'matrix': matrix.serialize(),
        'false_completions': false_completions,
    }
    _report(args, 'audit', result, ruleset, text, notes=('checker',))
    if args.plot_data:
        _write(args.plot_data, dump_json(plot_data(matrix=matrix)))
    return EXIT_FINDINGS if false_completions else EXIT_OK


def _detect_study(records):
    conditions = {c.value for c in Condition}
    return TEXT_STUDY if records and all(r.condition in conditions for r in records) else MARKET_STUDY


def _text_study(records):
    cross = cross_judge_aggregate(records)
    rows = condition_means(cross.outputs, QUALITY)
    result = {
        'outputs': len(cross.outputs),
        'coverage_gaps': list(cross.coverage_gaps),
        'self_judged_rows': cross.self_judged,
        'models': [r.serialize() for r in rows],
    }
    return result, condition_table(rows), plot_data(condition_rows=rows)


def _market_study(records, baseline, treatment):
    stats = variant_stats(records)
    base = [r for r in records if r.condition == baseline]
    treat = [r for r in records if r.condition == treatment]
    paired = paired_deltas(base, treat, QUALITY)
    per_model = per_model_deltas(base, treat, QUALITY)
    result = {
        'variants': [s.serialize() for s in stats],
        'paired': paired.serialize(),
        'per_model': {m: s.serialize() for (m, s) in per_model.items()},
    }
    return result, variant_table(stats) + '\n' + paired_summary(paired, baseline, treatment), \
        plot_data(variants=stats)


def cmd_stats(args):
    if not args.judge_files and not args.manifest:
        raise SkillctlError('Give judge record files, a --manifest, or both')
    result = {}
    text = ''
    notes = ()
    failed = False
    if args.judge_files:
        raw = [r for path in sorted(args.judge_files) for r in read_judge_records(path)]
        records, dropped = dedup_records(raw)
        study = args.study or _detect_study(records)
        if study == TEXT_STUDY:
            study_result, text, series = _text_study(records)
            notes = ('plain-expanded',)
        else:
            study_result, text, series = _market_study(records, args.baseline, args.treatment)
        result.update(study_result, study=study, rows=len(raw), duplicates_dropped=dropped)
        if args.plot_data:
            _write(args.plot_data, dump_json(series))
            logger.info('Wrote plot data to %s', args.plot_data)
    if args.manifest:
        check = experiment_arithmetic_check(load_manifest(args.manifest), os.path.dirname(args.manifest) or '.')
        result['manifest'] = check.serialize()
        text += '\nManifest: {} check(s), {} mismatch(es)\n'.format(len(check.checks), len(check.mismatches))
        text += ''.join('  {} {}: expected {}, found {}\n'.format(c.study, c.name, c.expected, c.actual)
                        for c in check.mismatches)
        failed = not check.ok
    _report(args, 'stats', result, load_ruleset(args.rules), text.lstrip('\n'), notes)
    return EXIT_FINDINGS if failed else EXIT_OK


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--rules', help='Rule set YAML overlaid on the packaged defaults (env: SKILLCTL_RULES).')
    common.add_argument('--format', choices=('json', 'text'), default='text', help='Report format.')
    common.add_argument('--fail-on', choices=('error', 'warning'), default='error',
                        help='Lowest severity that makes the command exit 1.')
    common.add_argument('--out', help='Write the report (or generated file) here instead of stdout.')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='Log debug output.')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='Log warnings and errors only.')

    parser = argparse.ArgumentParser(prog='skillctl', description='Contractual skill toolchain.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--config', help='Configuration file (YAML or JSON, env: SKILLCTL_CONFIG).')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    cmd = sub.add_parser('lint', parents=[common], help='Validate SKILL.md files or directories of skills.')
    cmd.add_argument('paths', nargs='+')
    cmd.add_argument('--template', help='Template variant to validate against, overriding the frontmatter.')
    cmd.set_defaults(func=cmd_lint)

    cmd = sub.add_parser('compile', parents=[common], help='Contract source (YAML) to SKILL.md.')
    cmd.add_argument('source')
    cmd.set_defaults(func=cmd_compile)

    cmd = sub.add_parser('import', parents=[common], help='SKILL.md to contract source (YAML).')
    cmd.add_argument('skill')
    cmd.set_defaults(func=cmd_import)

    cmd = sub.add_parser('derive', parents=[common], help='Write an instruction-condition variant of a skill.')
    cmd.add_argument('skill', help='SKILL.md or contract source.')
    cmd.add_argument('--condition', required=True, help=', '.join(c.value for c in Condition))
    cmd.set_defaults(func=cmd_derive)

    cmd = sub.add_parser('check', parents=[common], help='Check agent outputs against a skill.')
    cmd.add_argument('outputs', nargs='+')
    cmd.add_argument('--skill', required=True, help='SKILL.md or contract source.')
    cmd.add_argument('--template', help='Also validate the skill against this template variant.')
    cmd.set_defaults(func=cmd_check)

    cmd = sub.add_parser('audit', parents=[common], help='Audit tool-challenge transcripts.')
    cmd.add_argument('transcripts', nargs='+')
    cmd.add_argument('--registry', help='Tool registry YAML.')
    cmd.add_argument('--expect-records', type=int, help='Transcripts each model must have (0 skips the check).')
    cmd.add_argument('--plot-data', help='Write the attempt matrix as plot data.')
    cmd.set_defaults(func=cmd_audit)

    cmd = sub.add_parser('stats', parents=[common], help='Aggregate judge records and check experiment arithmetic.')
    cmd.add_argument('judge_files', nargs='*')
    cmd.add_argument('--manifest', help='Experiment manifest YAML.')
    cmd.add_argument('--study', choices=(TEXT_STUDY, MARKET_STUDY), help='Defaults to detection by condition.')
    cmd.add_argument('--baseline', default='original', help='Baseline variant for paired comparisons.')
    cmd.add_argument('--treatment', default='contractual', help='Treatment variant for paired comparisons.')
    cmd.add_argument('--plot-data', help='Write plot data JSON here.')
    cmd.set_defaults(func=cmd_stats)
    return parser


def main(argv=None):
    """
    :param argv: Optional[List[str]]; Arguments, defaults to `sys.argv[1:]`.
    :return: int; Exit code.
    """
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK

    logzero.loglevel(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)
    try:
        Config().load_env()
        if args.config:
            if args.config.endswith('.json'):
                Config().load_json(args.config)
            else:
                Config().load_yaml(args.config)
        return args.func(args)
    except (SkillctlError, OSError, UnicodeDecodeError, yaml.YAMLError) as err:
        logger.error('%s', err)
    return EXIT_USAGE


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()
