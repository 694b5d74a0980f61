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

""" Task-contract data model, template-variant requirement profiles and contract validation.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

from logzero import logger

from skillctl.config import Config
from skillctl.fields import FieldKind
from skillctl.findings import Finding, sort_findings
from skillctl.skill_doc import Frontmatter

PRIVACY_CLASSES = ('public', 'internal', 'confidential', 'restricted')


@dataclass(frozen=True)
class InputItem:
    """
    name: str; Input name, e.g. 'customer_account'.
    required: bool; False for optional inputs.
    path_hint: Optional[str]; Where the input is found.
    privacy: Optional[str]; One of PRIVACY_CLASSES.
    """
    name: str
    required: bool = True
    path_hint: Optional[str] = None
    privacy: Optional[str] = None


@dataclass(frozen=True)
class HandoffItem:
    """
    role: str; Target role, e.g. 'finance'.
    trigger: Optional[str]; When to hand off.
    """
    role: str
    trigger: Optional[str] = None


@dataclass(frozen=True)
class FieldContent:
    """Prose content of a contract field. Structured fields extend this with their sub-entries."""
    text: str = ''

    def has_entries(self):
        return False

    def is_empty(self):
        """A field whose text is only whitespace and which has no sub-entries counts as absent."""
        return not self.text.strip() and not self.has_entries()


@dataclass(frozen=True)
class InputsContent(FieldContent):
    items: Tuple[InputItem, ...] = ()

    def has_entries(self):
        return bool(self.items)

    @property
    def required_items(self):
        return tuple(i for i in self.items if i.required)

    @property
    def optional_items(self):
        return tuple(i for i in self.items if not i.required)


@dataclass(frozen=True)
class PermissionsContent(FieldContent):
    allowed: Tuple[str, ...] = ()
    forbidden: Tuple[str, ...] = ()

    def has_entries(self):
        return bool(self.allowed or self.forbidden)


@dataclass(frozen=True)
class HumanGatesContent(FieldContent):
    gates: Tuple[str, ...] = ()

    def has_entries(self):
        return bool(self.gates)


@dataclass(frozen=True)
class HandoffContent(FieldContent):
    targets: Tuple[HandoffItem, ...] = ()

    def has_entries(self):
        return bool(self.targets)


@dataclass(frozen=True)
class OutputContent(FieldContent):
    required_sections: Tuple[str, ...] = ()
    max_words: Optional[int] = None
    language: Optional[str] = None

    def __post_init__(self):
        if len(set(self.required_sections)) != len(self.required_sections):
            raise ValueError('Output required sections must be unique')

    def has_entries(self):
        return bool(self.required_sections) or self.max_words is not None or self.language is not None


@dataclass(frozen=True)
class ExtraSection:
    """A section that maps to no contract field, kept so nothing is lost on compile. Emitted at level 2."""
    heading: str
    body: str


class TemplateVariant(Enum):
    """Skill categories, each with its own field requirement profile."""
    BUSINESS_PROCESS = 'business-process'
    TOOL_OPERATION = 'tool-operation'
    RESEARCH_ANALYSIS = 'research-analysis'
    CODING = 'coding'
    CONTENT_PRODUCTION = 'content-production'
    MULTI_AGENT = 'multi-agent'

    @staticmethod
    def parse(value):
        """
        Parse a variant name leniently: 'tool-operation', 'Tool Operation', 'ToolOperation' and 'tool_operation' are
        all accepted.
        :param value: str; Variant name.
        :return: Optional[TemplateVariant]; None if it names no variant.
        """
        squashed = ''.join(c for c in str(value).lower() if c.isalnum())
        for variant in TemplateVariant:
            if variant.value.replace('-', '') == squashed:
                return variant
        return None


@dataclass(frozen=True)
class TaskContract:
    """
    Structured form of one contractual skill.

    metadata: Frontmatter; Must carry non-empty `name` and `description`; `template` selects the variant.
    fields: Dict[FieldKind, FieldContent]; Populated fields only.
    extras: Tuple[ExtraSection, ...]; Sections that are not contract fields.
    preamble: str; Body text before the first field, such as a title heading.
    spans: Dict[FieldKind, Tuple[int, int]]; Source spans when imported from a SKILL.md (not compared).
    """
    metadata: Frontmatter = field(default_factory=Frontmatter)
    fields: Dict[FieldKind, FieldContent] = field(default_factory=dict)
    extras: Tuple[ExtraSection, ...] = ()
    preamble: str = ''
    spans: Mapping[FieldKind, Tuple[int, int]] = field(default_factory=dict, compare=False)

    @property
    def name(self):
        return self.metadata.get('name', '').strip()

    @property
    def description(self):
        return self.metadata.get('description', '').strip()

    @property
    def variant(self):
        """
        :return: Optional[TemplateVariant]; Declared variant, business-process when undeclared, None when the
        declared value is unknown.
        """
        declared = self.metadata.get('template', '').strip()
        if not declared:
            return TemplateVariant.BUSINESS_PROCESS
        return TemplateVariant.parse(declared)

    def get(self, kind):
        """
        :param kind: FieldKind
        :return: Optional[FieldContent]; None when the field is absent or empty.
        """
        content = self.fields.get(kind)
        if content is None or content.is_empty():
            return None
        return content

    def has(self, kind):
        return self.get(kind) is not None

    def populated(self):
        """
        :return: List[Tuple[FieldKind, FieldContent]]; Populated fields in canonical order.
        """
        return [(kind, self.fields[kind]) for kind in FieldKind if self.has(kind)]


@dataclass(frozen=True)
class RequirementProfile:
    """
    required: FrozenSet[FieldKind]; Fields whose absence is an error.
    recommended: FrozenSet[FieldKind]; Fields whose absence is a warning.
    """
    required: frozenset
    recommended: frozenset = frozenset()

    def __post_init__(self):
        if self.required & self.recommended:
            raise ValueError('A field cannot be both required and recommended')


_F = FieldKind
PROFILES = {
    TemplateVariant.BUSINESS_PROCESS: RequirementProfile(frozenset(FieldKind)),
    TemplateVariant.TOOL_OPERATION: RequirementProfile(
        frozenset({_F.WHEN_TO_USE, _F.GOAL, _F.INPUTS, _F.WORKFLOW, _F.PERMISSIONS, _F.HUMAN_GATES, _F.CONSTRAINTS,
                   _F.VERIFICATION}),
        frozenset({_F.OUTPUT, _F.HANDOFF})),
    TemplateVariant.RESEARCH_ANALYSIS: RequirementProfile(
        frozenset({_F.GOAL, _F.AUDIENCE, _F.INPUTS, _F.CONTEXT, _F.EVIDENCE, _F.OUTPUT, _F.QUALITY_BAR,
                   _F.VERIFICATION}),
        frozenset({_F.HANDOFF})),
    TemplateVariant.CODING: RequirementProfile(
        frozenset({_F.GOAL, _F.CONTEXT, _F.WORKFLOW, _F.PERMISSIONS, _F.CONSTRAINTS, _F.VERIFICATION}),
        frozenset({_F.INPUTS, _F.QUALITY_BAR, _F.HANDOFF})),
    TemplateVariant.CONTENT_PRODUCTION: RequirementProfile(
        frozenset({_F.GOAL, _F.AUDIENCE, _F.OUTPUT, _F.QUALITY_BAR, _F.VERIFICATION}),
        frozenset({_F.EVIDENCE, _F.CONSTRAINTS})),
    TemplateVariant.MULTI_AGENT: RequirementProfile(
        frozenset({_F.GOAL, _F.WORKFLOW, _F.PERMISSIONS, _F.HUMAN_GATES, _F.HANDOFF, _F.VERIFICATION}),
        frozenset({_F.INPUTS, _F.QUALITY_BAR})),
}


def _kinds(names):
    kinds = set()
    for name in names or ():
        kind = FieldKind.from_key(name)
        if kind is None:
            raise ValueError('Unknown field {!r} in profile override'.format(name))
        kinds.add(kind)
    return frozenset(kinds)


def requirement_profile(variant):
    """
    Look up the field requirement profile of a template variant. Overrides in `Config()['profiles']`, keyed by
    variant name with `required` and `recommended` field lists, replace the built-in entry.
    :param variant: TemplateVariant
    :return: RequirementProfile
    """
    overrides = Config().get('profiles') or {}
    for (name, override) in overrides.items():
        if TemplateVariant.parse(name) is variant:
            return RequirementProfile(_kinds(override.get('required')), _kinds(override.get('recommended')))
    return PROFILES[variant]


def _entry_findings(kind, content, location):
    checks = {
        FieldKind.INPUTS: lambda c: [] if c.required_items else ['inputs.required.empty'],
        FieldKind.PERMISSIONS: lambda c: (([] if c.allowed else ['permissions.allowed.empty'])
                                          + ([] if c.forbidden else ['permissions.forbidden.empty'])),
        FieldKind.HUMAN_GATES: lambda c: [] if c.gates else ['human_gates.gates.empty'],
        FieldKind.HANDOFF: lambda c: [] if c.targets else ['handoff.targets.empty'],
        FieldKind.OUTPUT: lambda c: [] if c.required_sections else ['output.sections.empty'],
    }
    check = checks.get(kind)
    if not check:
        return []
    return [Finding.make(rule_id, field=kind, location=location) for rule_id in check(content)]


def validate_contract(contract, variant=None, budget=None):
    """
    Check a contract against the requirement profile of its template variant.
    :param contract: TaskContract; Contract to check.
    :param variant: Optional[TemplateVariant]; Override of the variant declared in the frontmatter.
    :param budget: Optional[int]; Description length budget in characters, defaults to
    `Config()['description-budget']`.
    :return: List[Finding]; Findings in stable order, empty when the contract is complete.
    """
    findings = []
    budget = Config()['description-budget'] if budget is None else budget

    if not contract.name:
        findings.append(Finding.make('frontmatter.name.missing'))
    if not contract.description:
        findings.append(Finding.make('frontmatter.description.missing'))
    elif len(contract.description) > budget:
        findings.append(Finding.make(
            'frontmatter.description.too-long',
            'Description is {} characters; keep it under {} so it stays trigger-oriented'.format(
                len(contract.description), budget)))

    if variant is None:
        variant = contract.variant
        if variant is None:
            findings.append(Finding.make(
                'frontmatter.template.unknown',
                'Unknown template {!r}; validating as business-process'.format(contract.metadata.get('template'))))
            variant = TemplateVariant.BUSINESS_PROCESS

    profile = requirement_profile(variant)
    for kind in FieldKind:
        content = contract.get(kind)
        if content is None:
            if kind in profile.required:
                findings.append(Finding.make('field.missing.' + kind.key, field=kind))
            elif kind in profile.recommended:
                findings.append(Finding.make('field.recommended.' + kind.key, field=kind))
            continue
        findings.extend(_entry_findings(kind, content, contract.spans.get(kind)))

    logger.debug('Validated %r as %s: %d finding(s)', contract.name, variant.value, len(findings))
    return sort_findings(findings)
