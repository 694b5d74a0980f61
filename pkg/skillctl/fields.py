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

""" The contract field vocabulary and heading lookup.
"""

from enum import Enum
from types import MappingProxyType

from skillctl.util import normalize_heading


class FieldKind(Enum):
    """
    The fourteen recommended fields of a contractual skill, in their canonical order. The value is the display name
    used as a section heading.
    """
    WHEN_TO_USE = 'When To Use'
    GOAL = 'Goal'
    AUDIENCE = 'Audience'
    INPUTS = 'Inputs'
    CONTEXT = 'Context'
    WORKFLOW = 'Workflow'
    PERMISSIONS = 'Permissions'
    HUMAN_GATES = 'Human Gates'
    CONSTRAINTS = 'Constraints'
    EVIDENCE = 'Evidence'
    OUTPUT = 'Output'
    QUALITY_BAR = 'Quality Bar'
    VERIFICATION = 'Verification'
    HANDOFF = 'Handoff'

    @property
    def display(self):
        return self.value

    @property
    def key(self):
        """snake_case name used in contract source files, e.g. `human_gates`."""
        return self.name.lower()

    @property
    def index(self):
        return _ORDER[self]

    @staticmethod
    def from_key(key):
        """
        Look a field up by its contract-source key or display name.
        :param key: str; e.g. 'human_gates' or 'Human Gates'.
        :return: Optional[FieldKind]
        """
        norm = normalize_heading(key.replace('_', ' ').replace('-', ' '))
        return _BY_NORMALIZED.get(norm)


_ORDER = {kind: i for i, kind in enumerate(FieldKind)}
_BY_NORMALIZED = {normalize_heading(kind.display): kind for kind in FieldKind}

DEFAULT_ALIASES = MappingProxyType({
    'scope': FieldKind.WHEN_TO_USE,
    'when to use this skill': FieldKind.WHEN_TO_USE,
    'applicability': FieldKind.WHEN_TO_USE,
    'objective': FieldKind.GOAL,
    'purpose': FieldKind.GOAL,
    'target audience': FieldKind.AUDIENCE,
    'required inputs': FieldKind.INPUTS,
    'background': FieldKind.CONTEXT,
    'steps': FieldKind.WORKFLOW,
    'procedure': FieldKind.WORKFLOW,
    'process': FieldKind.WORKFLOW,
    'allowed actions': FieldKind.PERMISSIONS,
    'tool permissions': FieldKind.PERMISSIONS,
    'approval gates': FieldKind.HUMAN_GATES,
    'human approval': FieldKind.HUMAN_GATES,
    'rules': FieldKind.CONSTRAINTS,
    'guardrails': FieldKind.CONSTRAINTS,
    'evidence policy': FieldKind.EVIDENCE,
    'sources': FieldKind.EVIDENCE,
    'output format': FieldKind.OUTPUT,
    'deliverable': FieldKind.OUTPUT,
    'acceptance criteria': FieldKind.QUALITY_BAR,
    'self-check': FieldKind.VERIFICATION,
    'checks': FieldKind.VERIFICATION,
    'escalation': FieldKind.HANDOFF,
})


def build_alias_table(*extras):
    """
    Merge user alias maps over the default alias table.
    :param extras: Mapping[str, Union[str, FieldKind]]; Heading -> field key, display name or FieldKind. Later maps
    win.
    :return: Mapping[str, FieldKind]; Normalized heading -> FieldKind.
    """
    table = dict(DEFAULT_ALIASES)
    for extra in extras:
        for (heading, target) in (extra or {}).items():
            kind = target if isinstance(target, FieldKind) else FieldKind.from_key(str(target))
            if kind is None:
                raise ValueError('Alias "{}" points at unknown field "{}"'.format(heading, target))
            table[normalize_heading(heading)] = kind
    return MappingProxyType(table)


def normalize_section_name(raw, aliases=None):
    """
    Map a section heading to a contract field.
    :param raw: str; Heading as written, e.g. 'human gates' or 'Approval Gates'.
    :param aliases: Optional[Mapping[str, FieldKind]]; Normalized alias table, defaults to `DEFAULT_ALIASES`.
    :return: Optional[FieldKind]; None if the heading is not a contract field.
    """
    norm = normalize_heading(raw)
    kind = _BY_NORMALIZED.get(norm)
    if kind is not None:
        return kind
    return (DEFAULT_ALIASES if aliases is None else aliases).get(norm)
