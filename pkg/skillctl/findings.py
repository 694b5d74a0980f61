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

""" Lint diagnostics and the rule registry they are drawn from.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from skillctl.fields import FieldKind


class Severity(Enum):
    """Finding severity, ordered error > warning > info."""
    ERROR = 'error'
    WARNING = 'warning'
    INFO = 'info'

    @property
    def rank(self):
        return {'error': 2, 'warning': 1, 'info': 0}[self.value]

    def at_least(self, other):
        """
        :param other: Severity; Threshold.
        :return: bool; True if this severity is as severe as `other` or more.
        """
        return self.rank >= other.rank


def _field_rules():
    rules = {}
    for kind in FieldKind:
        rules['field.missing.' + kind.key] = (
            Severity.ERROR, 'Required field "{}" is absent or empty for the template variant.'.format(kind.display))
        rules['field.recommended.' + kind.key] = (
            Severity.WARNING, 'Recommended field "{}" is absent for the template variant.'.format(kind.display))
    return rules


# rule_id -> (default severity, description). docs/rules.md mirrors this table.
RULES = {
    'parse.frontmatter.malformed': (Severity.ERROR, 'Frontmatter block is not a flat list of `key: value` lines.'),
    'frontmatter.name.missing': (Severity.ERROR, 'Frontmatter has no non-empty `name`.'),
    'frontmatter.description.missing': (Severity.ERROR, 'Frontmatter has no non-empty `description`.'),
    'frontmatter.description.too-long': (Severity.WARNING, 'Description exceeds the trigger-length budget.'),
    'frontmatter.template.unknown': (Severity.ERROR, 'Frontmatter `template` names no known template variant.'),
    'section.ambiguous': (Severity.ERROR, 'Two sections map to the same contract field; the first one is used.'),
    'section.unrecognized': (Severity.INFO, 'Section heading maps to no contract field; kept as an extra.'),
    'section.level': (Severity.INFO, 'Contract field heading is not a level-2 heading.'),
    'import.entry.malformed': (Severity.WARNING, 'Structured bullet could not be read; kept as prose.'),
    'inputs.required.empty': (Severity.INFO, 'Inputs has no required input items.'),
    'permissions.allowed.empty': (Severity.INFO, 'Permissions lists no allowed actions.'),
    'permissions.forbidden.empty': (Severity.INFO, 'Permissions lists no forbidden actions.'),
    'human_gates.gates.empty': (Severity.INFO, 'Human Gates lists no gate conditions.'),
    'handoff.targets.empty': (Severity.INFO, 'Handoff lists no target role and trigger items.'),
    'output.sections.empty': (Severity.INFO, 'Output declares no required sections.'),
}
RULES.update(_field_rules())


@dataclass(frozen=True)
class Finding:
    """
    One validation or lint diagnostic.

    rule_id: str; Key into `RULES`.
    severity: Severity; Defaults to the registry severity.
    message: str; Human readable explanation.
    field: Optional[FieldKind]; Contract field the finding is about.
    location: Optional[Tuple[int, int]]; (start_line, end_line) in the source file.
    path: Optional[str]; Source file, filled in by the CLI.
    """
    rule_id: str
    severity: Severity
    message: str
    field: Optional[FieldKind] = None
    location: Optional[Tuple[int, int]] = None
    path: Optional[str] = None

    @staticmethod
    def make(rule_id, message=None, field=None, location=None, severity=None):
        """
        Create a finding for a registered rule.
        :param rule_id: str; Registered rule id.
        :param message: Optional[str]; Message, defaults to the rule description.
        :param field: Optional[FieldKind]; Field the finding is about.
        :param location: Optional[Tuple[int, int]]; Source span.
        :param severity: Optional[Severity]; Override of the registry severity.
        :return: Finding
        """
        default_severity, description = RULES[rule_id]
        return Finding(rule_id, severity or default_severity, message or description, field, location)

    def with_path(self, path):
        return Finding(self.rule_id, self.severity, self.message, self.field, self.location, path)

    def sort_key(self):
        order = -1 if self.field is None else self.field.index
        return self.path or '', order, self.rule_id, self.location or (0, 0)

    def serialize(self):
        """
        Convert this finding into a serializable dictionary.
        :return: Dict[str, any]
        """
        return {
            'rule_id': self.rule_id,
            'severity': self.severity.value,
            'message': self.message,
            'field': self.field.display if self.field else None,
            'location': list(self.location) if self.location else None,
            'path': self.path,
        }

    def __str__(self):
        where = self.path or '<input>'
        if self.location:
            where = '{}:{}'.format(where, self.location[0])
        return '{} [{}] {}: {}'.format(where, self.severity.value, self.rule_id, self.message)


def sort_findings(findings):
    """
    Stable order: by path, then field enumeration order (metadata findings first), then rule id.
    :param findings: Iterable[Finding]
    :return: List[Finding]
    """
    return sorted(findings, key=Finding.sort_key)


def has_severity(findings, threshold):
    """
    :param findings: Iterable[Finding]
    :param threshold: Severity; Minimum severity to look for.
    :return: bool; True if any finding is at least as severe as the threshold.
    """
    return any(f.severity.at_least(threshold) for f in findings)
