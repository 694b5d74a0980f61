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

""" Rule sets for output checks and completion-claim detection: pattern rules plus marker and phrase lists.

A rule set is loaded from the packaged defaults (`skillctl/data/rules.yml`) and optionally overlaid with a user
file. In the overlay, `rules` entries replace defaults with the same id and add new ones, `disable` lists rule ids
to drop, and every other key replaces the default value.
"""

import copy
import functools
import os
import re
from dataclasses import dataclass, field
from typing import Mapping, Tuple

import yaml
from logzero import logger

from skillctl.config import Config
from skillctl.errors import RuleSetError
from skillctl.fields import build_alias_table
from skillctl.util import canonical_json, sha256_hex

DEFAULT_RULES_PATH = os.path.join(os.path.dirname(__file__), 'data', 'rules.yml')
BOUNDARY_CLASSES = ('commitment', 'privacy')
LEXEME = '{lexeme}'


def check_pattern_subset(pattern):
    """
    Reject regex features outside the documented subset: inline flags, named groups, look-around and
    back-references.
    :param pattern: str; Pattern to check.
    :raises RuleSetError: The pattern uses an unsupported feature or does not compile.
    """
    index = 0
    in_class = False
    while index < len(pattern):
        char = pattern[index]
        if char == '\\':
            following = pattern[index + 1:index + 2]
            if following.isdigit() and following != '0':
                raise RuleSetError('Back-references are not supported: {!r}'.format(pattern))
            index += 2
            continue
        if in_class:
            if char == ']':
                in_class = False
        elif char == '[':
            in_class = True
            if pattern[index + 1:index + 2] == '^':
                index += 1
            if pattern[index + 1:index + 2] == ']':
                index += 1
        elif char == '(' and pattern[index + 1:index + 2] == '?' and pattern[index + 2:index + 3] != ':':
            raise RuleSetError('Inline flags, named groups and look-around are not supported: {!r}'.format(pattern))
        index += 1
    try:
        re.compile(pattern)
    except re.error as err:
        raise RuleSetError('Pattern {!r} does not compile: {}'.format(pattern, err))


@functools.lru_cache(maxsize=None)
def compile_pattern(pattern, flags=''):
    """
    :param pattern: str; Pattern in the supported subset.
    :param flags: str; 'i' for case-insensitive matching.
    :return: re.Pattern
    """
    return re.compile(pattern, re.IGNORECASE if 'i' in flags else 0)


@functools.lru_cache(maxsize=None)
def marker_regex(marker, whole_word=True, plural=False):
    """
    Case-insensitive regex for a marker phrase. Markers always start on a word boundary; `whole_word` also requires
    one at the end, so 'escalat' can work as a stem.
    """
    suffix = ('s?' if plural else '') + (r'\b' if whole_word else '')
    return re.compile(r'\b' + re.escape(marker) + suffix, re.IGNORECASE)


@dataclass(frozen=True)
class PatternRule:
    """
    rule_id: str; Unique id, e.g. 'commitment.price'.
    pattern: str; Regular expression in the supported subset.
    boundary_class: str; 'commitment' or 'privacy'.
    flags: str; '' or 'i'.
    """
    rule_id: str
    pattern: str
    boundary_class: str
    flags: str = ''

    def __post_init__(self):
        if self.boundary_class not in BOUNDARY_CLASSES:
            raise RuleSetError('Rule {} has unknown class {!r}'.format(self.rule_id, self.boundary_class))
        if set(self.flags) - {'i'}:
            raise RuleSetError('Rule {} has unsupported flags {!r}'.format(self.rule_id, self.flags))
        check_pattern_subset(self.pattern)

    @property
    def regex(self):
        return compile_pattern(self.pattern, self.flags)

    def finditer(self, text):
        return self.regex.finditer(text)

    def serialize(self):
        return {'id': self.rule_id, 'class': self.boundary_class, 'pattern': self.pattern, 'flags': self.flags}


@dataclass(frozen=True)
class RuleSet:
    """
    Everything the output checker and the transcript auditor match against.
    """
    rules: Tuple[PatternRule, ...] = ()
    uncertainty_markers: Tuple[str, ...] = ()
    mitigation_markers: Tuple[str, ...] = ()
    escalation_markers: Tuple[str, ...] = ()
    handoff_roles: Tuple[str, ...] = ()
    handoff_triggers: Tuple[str, ...] = ()
    claim_templates: Tuple[str, ...] = ()
    aliases: Mapping[str, str] = field(default_factory=dict)
    sources: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        ids = [r.rule_id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise RuleSetError('Duplicate rule ids in rule set')
        for template in self.claim_templates:
            if LEXEME not in template:
                raise RuleSetError('Claim template {!r} has no {} placeholder'.format(template, LEXEME))
            check_pattern_subset(template.replace(LEXEME, 'x'))

    def by_class(self, boundary_class):
        return tuple(r for r in self.rules if r.boundary_class == boundary_class)

    @property
    def commitment_rules(self):
        return self.by_class('commitment')

    @property
    def privacy_rules(self):
        return self.by_class('privacy')

    def claim_patterns(self, lexeme):
        """
        :param lexeme: str; Action lexeme such as 'sent'.
        :return: List[re.Pattern]; Completion-claim patterns for that lexeme, case-insensitive.
        """
        return [compile_pattern(t.replace(LEXEME, re.escape(lexeme)), 'i') for t in self.claim_templates]

    def alias_table(self):
        """
        :return: Mapping[str, FieldKind]; Default aliases, then the rule set's, then `Config()['aliases']`.
        """
        return build_alias_table(self.aliases, Config().get('aliases') or {})

    def serialize(self):
        return {
            'rules': [r.serialize() for r in self.rules],
            'uncertainty_markers': list(self.uncertainty_markers),
            'mitigation_markers': list(self.mitigation_markers),
            'escalation_markers': list(self.escalation_markers),
            'handoff': {'roles': list(self.handoff_roles), 'triggers': list(self.handoff_triggers)},
            'claims': {'templates': list(self.claim_templates)},
            'aliases': dict(self.aliases),
        }

    def digest(self):
        """
        :return: str; SHA-256 of the canonical JSON form. Equal rule sets hash equal wherever they were loaded from.
        """
        return sha256_hex(canonical_json(self.serialize()))


def _strings(obj, key):
    value = obj.get(key, [])
    if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
        raise RuleSetError('"{}" must be a list of non-empty strings'.format(key))
    return tuple(value)


def _read_rule(entry):
    if not isinstance(entry, dict) or not {'id', 'class', 'pattern'} <= set(entry):
        raise RuleSetError('Rule entries need id, class and pattern: {!r}'.format(entry))
    return PatternRule(str(entry['id']), str(entry['pattern']), str(entry['class']), str(entry.get('flags') or ''))


def ruleset_from_dict(obj, sources=()):
    """
    Build a RuleSet from the parsed rule-file structure.
    :param obj: Dict[str, any]; Parsed YAML.
    :param sources: Tuple[str, ...]; Files the structure came from.
    :return: RuleSet
    :raises RuleSetError: Malformed structure or unsupported pattern.
    """
    if not isinstance(obj, dict):
        raise RuleSetError('A rule file must be a mapping')
    handoff = obj.get('handoff') or {}
    claims = obj.get('claims') or {}
    aliases = obj.get('aliases') or {}
    if not isinstance(handoff, dict) or not isinstance(claims, dict) or not isinstance(aliases, dict):
        raise RuleSetError('"handoff", "claims" and "aliases" must be mappings')
    try:
        build_alias_table(aliases)
    except ValueError as err:
        raise RuleSetError(str(err))
    return RuleSet(
        rules=tuple(_read_rule(e) for e in obj.get('rules') or []),
        uncertainty_markers=_strings(obj, 'uncertainty_markers'),
        mitigation_markers=_strings(obj, 'mitigation_markers'),
        escalation_markers=_strings(obj, 'escalation_markers'),
        handoff_roles=_strings(handoff, 'roles'),
        handoff_triggers=_strings(handoff, 'triggers'),
        claim_templates=_strings(claims, 'templates'),
        aliases={str(k): str(v) for (k, v) in aliases.items()},
        sources=tuple(sources),
    )


def overlay(base, user):
    """
    Overlay a user rule file on a base one.
    :param base: Dict[str, any]; Base structure.
    :param user: Dict[str, any]; User structure.
    :return: Dict[str, any]; Merged structure; the inputs are not modified.
    """
    merged = copy.deepcopy(base)
    rules = {r['id']: r for r in merged.get('rules') or [] if isinstance(r, dict) and 'id' in r}
    for entry in user.get('rules') or []:
        if not isinstance(entry, dict) or 'id' not in entry:
            raise RuleSetError('Rule entries need an id: {!r}'.format(entry))
        rules[entry['id']] = entry
    for rule_id in user.get('disable') or []:
        if rules.pop(rule_id, None) is None:
            logger.warning('Cannot disable unknown rule %s', rule_id)
    for (key, value) in user.items():
        if key not in ('rules', 'disable'):
            merged[key] = copy.deepcopy(value)
    merged['rules'] = list(rules.values())
    return merged


def _read_yaml(path):
    try:
        with open(path, encoding='utf-8') as file:
            obj = yaml.safe_load(file) or {}
    except yaml.YAMLError as err:
        mark = getattr(err, 'problem_mark', None)
        raise RuleSetError('{}: {}'.format(path, err), mark.line + 1 if mark else None)
    if not isinstance(obj, dict):
        raise RuleSetError('{}: a rule file must be a mapping'.format(path))
    return obj


def load_ruleset(path=None):
    """
    Load the default rule set, overlaid with a user file.
    :param path: Optional[str]; User rule file. Defaults to `Config()['rules']` (set by `SKILLCTL_RULES`).
    :return: RuleSet
    """
    path = path or Config().get('rules')
    obj = _read_yaml(DEFAULT_RULES_PATH)
    sources = [DEFAULT_RULES_PATH]
    if path:
        logger.debug('Overlaying rules from %s', path)
        obj = overlay(obj, _read_yaml(path))
        sources.append(path)
    ruleset = ruleset_from_dict(obj, sources)
    logger.debug('Loaded %d rule(s), digest %s', len(ruleset.rules), ruleset.digest()[:12])
    return ruleset
