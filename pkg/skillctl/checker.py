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

""" Offline assertions that score an agent's text output against the output contract of its skill.

Checks are lexical: required sections by normalized title, commitment and privacy patterns from the rule set,
uncertainty markers, handoff statements and a word budget. The default patterns are reconstructions written
for skillctl.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from logzero import logger

from skillctl.fields import FieldKind
from skillctl.findings import Finding
from skillctl.rules import PatternRule, marker_regex
from skillctl.util import normalize_heading, word_count

REQUIRED_SECTIONS = 'required-sections'
FORBIDDEN_COMMITMENTS = 'forbidden-commitments'
PRIVACY = 'privacy'
UNCERTAINTY_MARKING = 'uncertainty-marking'
HANDOFF = 'handoff'
MAX_WORDS = 'max-words'
CRITICAL_ASSERTIONS = (FORBIDDEN_COMMITMENTS, PRIVACY)


@dataclass(frozen=True)
class OutputContract:
    """
    What an output must satisfy, compiled from a TaskContract and a RuleSet.
    """
    required_sections: Tuple[str, ...] = ()
    forbidden_commitment_rules: Tuple[PatternRule, ...] = ()
    privacy_rules: Tuple[PatternRule, ...] = ()
    uncertainty_required: bool = False
    uncertainty_markers: Tuple[str, ...] = ()
    handoff_required: bool = False
    handoff_roles: Tuple[str, ...] = ()
    handoff_triggers: Tuple[str, ...] = ()
    mitigation_markers: Tuple[str, ...] = ()
    max_words: Optional[int] = None

    def __post_init__(self):
        if len({normalize_heading(t) for t in self.required_sections}) != len(self.required_sections):
            raise ValueError('Required section titles must be unique')


@dataclass(frozen=True)
class Detail:
    """
    text: str; Matched text, or the missing item.
    location: Optional[Tuple[int, int]]; 1-based (line, column) of a match.
    rule_id: Optional[str]; Rule that matched.
    mitigated: bool; The matching line carries a non-commitment marker.
    """
    text: str
    location: Optional[Tuple[int, int]] = None
    rule_id: Optional[str] = None
    mitigated: bool = False

    def serialize(self):
        return {
            'text': self.text,
            'location': list(self.location) if self.location else None,
            'rule_id': self.rule_id,
            'mitigated': self.mitigated,
        }


@dataclass(frozen=True)
class AssertionResult:
    assertion_id: str
    passed: bool
    details: Tuple[Detail, ...] = ()

    def __post_init__(self):
        if not self.passed and not self.details:
            raise ValueError('A failed assertion must say why')

    def serialize(self):
        return {
            'assertion_id': self.assertion_id,
            'passed': self.passed,
            'details': [d.serialize() for d in self.details],
        }


@dataclass(frozen=True)
class CheckReport:
    """
    results: Tuple[AssertionResult, ...]; One result per assertion, in a fixed order.
    ruleset_sha256: Optional[str]; Digest of the rule set the output contract was compiled with.
    """
    results: Tuple[AssertionResult, ...]
    ruleset_sha256: Optional[str] = None

    def result(self, assertion_id):
        for result in self.results:
            if result.assertion_id == assertion_id:
                return result
        return None

    @property
    def sections_pass(self):
        result = self.result(REQUIRED_SECTIONS)
        return result is None or result.passed

    @property
    def critical(self):
        return any(not r.passed for r in self.results if r.assertion_id in CRITICAL_ASSERTIONS)

    @property
    def summary(self):
        passed = sum(1 for r in self.results if r.passed)
        return {'assertions': len(self.results), 'passed': passed, 'failed': len(self.results) - passed}

    def serialize(self):
        return {
            'results': [r.serialize() for r in self.results],
            'sections_pass': self.sections_pass,
            'critical': self.critical,
            'summary': self.summary,
            'ruleset_sha256': self.ruleset_sha256,
        }


def compile_output_contract(contract, ruleset, findings=None):
    """
    Derive the output contract of a skill.
    :param contract: TaskContract; Skill contract.
    :param ruleset: RuleSet; Patterns, markers and handoff phrases.
    :param findings: Optional[List[Finding]]; Receives an `output.sections.empty` info finding when Output is present
    but lists no required sections. The contract still compiles, with no required sections.
    :return: OutputContract
    """
    output = contract.get(FieldKind.OUTPUT)
    sections = ()
    max_words = None
    if output is not None:
        sections = output.required_sections
        max_words = output.max_words
        if not sections:
            logger.info('Output of %r declares no required sections', contract.name)
            if findings is not None:
                findings.append(Finding.make('output.sections.empty', field=FieldKind.OUTPUT,
                                             location=contract.spans.get(FieldKind.OUTPUT)))

    handoff = contract.get(FieldKind.HANDOFF)
    roles = list(ruleset.handoff_roles)
    if handoff is not None:
        roles.extend(t.role for t in handoff.targets if t.role not in roles)

    return OutputContract(
        required_sections=tuple(sections),
        forbidden_commitment_rules=ruleset.commitment_rules,
        privacy_rules=ruleset.privacy_rules,
        uncertainty_required=contract.has(FieldKind.EVIDENCE),
        uncertainty_markers=ruleset.uncertainty_markers,
        handoff_required=handoff is not None,
        handoff_roles=tuple(roles),
        handoff_triggers=ruleset.handoff_triggers,
        mitigation_markers=ruleset.mitigation_markers,
        max_words=max_words,
    )


def _title_key(line):
    line = line.strip().lstrip('#').strip()
    for wrap in ('**', '__'):
        if len(line) > 2 * len(wrap) and line.startswith(wrap) and line.endswith(wrap):
            line = line[len(wrap):-len(wrap)].strip()
    if line.endswith(':'):
        line = line[:-1]
    return normalize_heading(line)


def check_required_sections(text, oc):
    """
    Every required title must appear as a heading or as a line of its own (bold and a trailing colon allowed).
    :param text: str; Agent output.
    :param oc: OutputContract
    :return: AssertionResult; Details list the missing titles.
    """
    present = {_title_key(line) for line in text.split('\n')}
    missing = [Detail(title) for title in oc.required_sections if normalize_heading(title) not in present]
    return AssertionResult(REQUIRED_SECTIONS, not missing, tuple(missing))


def _position(text, offset):
    line_start = text.rfind('\n', 0, offset) + 1
    return text.count('\n', 0, offset) + 1, offset - line_start + 1


def _line_at(text, offset):
    end = text.find('\n', offset)
    return text[text.rfind('\n', 0, offset) + 1:end if end >= 0 else len(text)]


def _scan(text, rules, mitigation_markers=()):
    details = []
    for rule in rules:
        for match in rule.finditer(text):
            if match.start() == match.end():
                continue
            line = _line_at(text, match.start())
            mitigated = any(marker_regex(m).search(line) for m in mitigation_markers)
            logger.debug('%s matched %r%s', rule.rule_id, match.group(0), ' (mitigated)' if mitigated else '')
            details.append(Detail(match.group(0), _position(text, match.start()), rule.rule_id, mitigated))
    details.sort(key=lambda d: (d.location, d.rule_id))
    return tuple(details)


def check_forbidden_commitments(text, oc):
    """
    Fails on any commitment-class match. Matches on lines with a non-commitment marker ('draft', 'pending
    approval', ...) still fail the check and are tagged mitigated.
    """
    details = _scan(text, oc.forbidden_commitment_rules, oc.mitigation_markers)
    return AssertionResult(FORBIDDEN_COMMITMENTS, not details, details)


def check_privacy(text, oc):
    """Fails on any privacy-class match (contact details, credential-shaped strings)."""
    details = _scan(text, oc.privacy_rules)
    return AssertionResult(PRIVACY, not details, details)


def check_uncertainty_marking(text, oc):
    """
    When the contract has an Evidence field, at least one uncertainty marker must appear as a word.
    """
    if not oc.uncertainty_required:
        return AssertionResult(UNCERTAINTY_MARKING, True)
    for marker in oc.uncertainty_markers:
        match = marker_regex(marker, plural=True).search(text)
        if match:
            return AssertionResult(UNCERTAINTY_MARKING, True, (Detail(match.group(0), _position(text, match.start())),))
    missing = tuple(Detail(m) for m in oc.uncertainty_markers) or (Detail('no uncertainty markers configured'),)
    return AssertionResult(UNCERTAINTY_MARKING, False, missing)


def check_handoff(text, oc):
    """
    When the contract has a Handoff field, some line must name a target role together with a handoff trigger
    phrase.
    """
    if not oc.handoff_required:
        return AssertionResult(HANDOFF, True)
    role_seen = trigger_seen = False
    for (number, line) in enumerate(text.split('\n'), start=1):
        roles = [r for r in oc.handoff_roles if marker_regex(r).search(line)]
        triggers = [t for t in oc.handoff_triggers if marker_regex(t, whole_word=False).search(line)]
        if roles and triggers:
            return AssertionResult(HANDOFF, True, (Detail(line.strip(), (number, 1)),))
        role_seen = role_seen or bool(roles)
        trigger_seen = trigger_seen or bool(triggers)
    missing = []
    if not role_seen:
        missing.append(Detail('target role (one of: {})'.format(', '.join(oc.handoff_roles))))
    if not trigger_seen:
        missing.append(Detail('handoff trigger (one of: {})'.format(', '.join(oc.handoff_triggers))))
    if not missing:
        missing.append(Detail('target role and handoff trigger on the same line'))
    return AssertionResult(HANDOFF, False, tuple(missing))


def check_max_words(text, oc):
    if oc.max_words is None:
        return AssertionResult(MAX_WORDS, True)
    count = word_count(text)
    if count <= oc.max_words:
        return AssertionResult(MAX_WORDS, True)
    return AssertionResult(MAX_WORDS, False, (Detail('{} words, limit {}'.format(count, oc.max_words)),))


def check_output(text, oc, ruleset=None):
    """
    Run every assertion against one output.
    :param text: str; Agent output.
    :param oc: OutputContract; Compiled output contract.
    :param ruleset: Optional[RuleSet]; Rule set `oc` was compiled from; its digest is recorded in the report.
    :return: CheckReport; `critical` is set when the commitment or privacy check fails.
    """
    text = text.replace('\r\n', '\n').replace('\r', '\n')
    results = (
        check_required_sections(text, oc),
        check_forbidden_commitments(text, oc),
        check_privacy(text, oc),
        check_uncertainty_marking(text, oc),
        check_handoff(text, oc),
        check_max_words(text, oc),
    )
    report = CheckReport(results, ruleset.digest() if ruleset is not None else None)
    logger.debug('Checked output: %d/%d assertion(s) passed', report.summary['passed'], len(results))
    return report
