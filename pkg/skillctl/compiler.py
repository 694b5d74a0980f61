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

r""" Translation between contract sources, TaskContracts and SKILL.md documents, and derivation of the four
instruction conditions used in skill experiments.

Structured sub-entries live in SKILL.md sections as bullets with a `key: value` prefix, after the field's prose:

    - required: customer_account; path: crm/accounts; privacy: confidential
    - optional: call_notes
    - allowed: read CRM records
    - forbidden: send email to the customer
    - gate: any discount above 10%
    - handoff: finance; trigger: discount or payment terms requested
    - section: Next Steps
    - max_words: 400
    - language: en

In `required`, `optional` and `handoff` bullets a literal `;` is written `\;` and a literal backslash `\\`. A prose
line that would read as a bullet of the section or as a heading that ends the section is written with a leading
backslash (`\- gate: ...`, `\## Notes`), which Markdown renders as the plain character.
"""

import re
from enum import Enum

import yaml
from logzero import logger

from skillctl.contract import (
    PRIVACY_CLASSES, ExtraSection, FieldContent, HandoffContent, HandoffItem, HumanGatesContent, InputItem,
    InputsContent, OutputContent, PermissionsContent, TaskContract
)
from skillctl.errors import ContractSourceError
from skillctl.fields import FieldKind, normalize_section_name
from skillctl.findings import Finding, sort_findings
from skillctl.skill_doc import (
    Frontmatter, SectionBlock, SkillDocument, heading_is_closed, heading_level, locate_section, parse_skill_markdown,
    unfenced_lines
)
from skillctl.util import parse_bool

_ENTRY = re.compile(r'^[ \t]*[-*+][ \t]+([A-Za-z_]+):[ \t]*(.*?)\s*$')
_ESCAPED = re.compile(r'^([ \t]*)\\([\\#*+-])')
_BULLET = re.compile(r'^\s*(?:[-*+]|\d+[.)])\s+\S')
FIELD_LEVEL = 2
REQUIRED_BEHAVIOR = 'Required Behavior'


class Condition(Enum):
    """The four instruction conditions compared in skill experiments."""
    NO_SKILL = 'no-skill'
    MINIMAL = 'minimal'
    PLAIN_EXPANDED = 'plain-expanded'
    CONTRACTUAL = 'contractual'

    @staticmethod
    def parse(value):
        """
        :param value: str; e.g. 'no-skill', 'NoSkill', 'plain', 'Plain Expanded'.
        :return: Optional[Condition]
        """
        squashed = ''.join(c for c in str(value).lower() if c.isalnum())
        squashed = {'none': 'noskill', 'plain': 'plainexpanded'}.get(squashed, squashed)
        for cond in Condition:
            if cond.value.replace('-', '') == squashed:
                return cond
        return None


class _EntryError(ValueError):
    pass


def _split_escaped(value):
    parts = []
    current = []
    chars = iter(value)
    for char in chars:
        if char == '\\':
            following = next(chars, '')
            if following in ('\\', ';'):
                current.append(following)
            else:
                current.append(char + following)
        elif char == ';':
            parts.append(''.join(current))
            current = []
        else:
            current.append(char)
    parts.append(''.join(current))
    return parts


def _escape_attr(value):
    return value.replace('\\', '\\\\').replace(';', '\\;')


def _split_attrs(value, allowed):
    parts = [p.strip() for p in _split_escaped(value)]
    head = parts[0]
    if not head:
        raise _EntryError('missing value')
    attrs = {}
    for part in parts[1:]:
        key, sep, attr = part.partition(':')
        key = key.strip()
        if not sep or key not in allowed or key in attrs or not attr.strip():
            raise _EntryError('bad attribute {!r}'.format(part))
        attrs[key] = attr.strip()
    return head, attrs


def _input_entry(key, value):
    name, attrs = _split_attrs(value, ('path', 'privacy'))
    return InputItem(name, key == 'required', attrs.get('path'), attrs.get('privacy'))


def _handoff_entry(_, value):
    role, attrs = _split_attrs(value, ('trigger',))
    return HandoffItem(role, attrs.get('trigger'))


def _plain_entry(_, value):
    if not value:
        raise _EntryError('missing value')
    return value


def _max_words_entry(_, value):
    if not value.isdigit() or int(value) <= 0:
        raise _EntryError('max_words must be a positive integer')
    return int(value)


# field -> {bullet key: entry parser}
_ENTRY_PARSERS = {
    FieldKind.INPUTS: {'required': _input_entry, 'optional': _input_entry},
    FieldKind.PERMISSIONS: {'allowed': _plain_entry, 'forbidden': _plain_entry},
    FieldKind.HUMAN_GATES: {'gate': _plain_entry},
    FieldKind.HANDOFF: {'handoff': _handoff_entry},
    FieldKind.OUTPUT: {'section': _plain_entry, 'max_words': _max_words_entry, 'language': _plain_entry},
}


def _build_content(kind, text, entries):
    if kind is FieldKind.INPUTS:
        return InputsContent(text, tuple(v for (_, v) in entries))
    if kind is FieldKind.PERMISSIONS:
        return PermissionsContent(text,
                                  tuple(v for (k, v) in entries if k == 'allowed'),
                                  tuple(v for (k, v) in entries if k == 'forbidden'))
    if kind is FieldKind.HUMAN_GATES:
        return HumanGatesContent(text, tuple(v for (_, v) in entries))
    if kind is FieldKind.HANDOFF:
        return HandoffContent(text, tuple(v for (_, v) in entries))
    if kind is FieldKind.OUTPUT:
        singles = {k: v for (k, v) in entries if k != 'section'}
        return OutputContent(text, tuple(v for (k, v) in entries if k == 'section'),
                             singles.get('max_words'), singles.get('language'))
    return FieldContent(text)


def _escape_lines(text, misread):
    """
    Put a backslash in front of every prose line outside code fences that `misread(index, line)` flags, and in front
    of lines that already open with a backslash escape.
    """
    lines = text.split('\n')
    for (index, line) in unfenced_lines(lines):
        if _ESCAPED.match(line) or misread(index, line):
            indent = len(line) - len(line.lstrip(' \t'))
            lines[index] = line[:indent] + '\\' + line[indent:]
    return '\n'.join(lines)


def _unescape_lines(text):
    lines = text.split('\n')
    for (index, line) in unfenced_lines(lines):
        match = _ESCAPED.match(line)
        if match:
            lines[index] = match[1] + line[match.end(1) + 1:]
    return '\n'.join(lines)


def _breaks_section(line):
    level = heading_level(line)
    return level is not None and level <= FIELD_LEVEL


def _misread_in(kind):
    parsers = _ENTRY_PARSERS.get(kind, {})

    def misread(_, line):
        match = _ENTRY.match(line)
        return _breaks_section(line) or bool(match and match[1] in parsers)
    return misread


def _escape_preamble(preamble):
    # every heading except a title would open a section
    lines = preamble.split('\n')
    headings = [(index, heading_level(line)) for (index, line) in unfenced_lines(lines)
                if heading_level(line) is not None]
    title = None
    if headings and headings[0][1] == 1 and not heading_is_closed(lines[headings[0][0]]) \
            and all(level != 1 for (_, level) in headings[1:]):
        title = headings[0][0]
    return _escape_lines(preamble, lambda index, line: index != title and heading_level(line) is not None)


def parse_field_body(kind, body, location=None, findings=None):
    """
    Read a section body into the content of a contract field, extracting structured bullets.
    :param kind: FieldKind; Field the section maps to.
    :param body: str; Section body.
    :param location: Optional[Tuple[int, int]]; Section span for findings.
    :param findings: Optional[List[Finding]]; Receives `import.entry.malformed` findings.
    :return: FieldContent
    """
    parsers = _ENTRY_PARSERS.get(kind)
    if not parsers:
        return FieldContent(_unescape_lines(body).strip())

    prose = []
    entries = []
    seen_singles = set()
    lines = body.split('\n')
    open_lines = dict(unfenced_lines(lines))
    for (index, line) in enumerate(lines):
        if index not in open_lines:
            prose.append(line)
            continue
        escaped = _ESCAPED.match(line)
        if escaped:
            prose.append(escaped[1] + line[escaped.end(1) + 1:])
            continue
        match = _ENTRY.match(line)
        if not match or match[1] not in parsers:
            prose.append(line)
            continue
        key, value = match[1], match[2]
        try:
            entry = parsers[key](key, value)
            if key in ('section', 'max_words', 'language'):
                marker = (key, entry) if key == 'section' else key
                if marker in seen_singles:
                    raise _EntryError('duplicate entry')
                seen_singles.add(marker)
        except _EntryError as err:
            logger.warning('Could not read %s entry %r: %s', kind.display, line.strip(), err)
            if findings is not None:
                findings.append(Finding.make(
                    'import.entry.malformed', '{} entry "{}": {}'.format(kind.display, line.strip(), err),
                    field=kind, location=location))
            prose.append(line)
            continue
        if isinstance(entry, InputItem) and entry.privacy and entry.privacy not in PRIVACY_CLASSES:
            if findings is not None:
                findings.append(Finding.make(
                    'import.entry.malformed',
                    'Input "{}" has unknown privacy class "{}"; expected one of {}'.format(
                        entry.name, entry.privacy, ', '.join(PRIVACY_CLASSES)),
                    field=kind, location=location))
        entries.append((key, entry))
    return _build_content(kind, '\n'.join(prose).strip(), entries)


def _input_line(item):
    line = '- {}: {}'.format('required' if item.required else 'optional', _escape_attr(item.name))
    if item.path_hint:
        line += '; path: ' + _escape_attr(item.path_hint)
    if item.privacy:
        line += '; privacy: ' + _escape_attr(item.privacy)
    return line


def _entry_lines(kind, content):
    if kind is FieldKind.INPUTS:
        return [_input_line(i) for i in content.items]
    if kind is FieldKind.PERMISSIONS:
        return ['- allowed: ' + a for a in content.allowed] + ['- forbidden: ' + f for f in content.forbidden]
    if kind is FieldKind.HUMAN_GATES:
        return ['- gate: ' + g for g in content.gates]
    if kind is FieldKind.HANDOFF:
        return ['- handoff: ' + _escape_attr(t.role) + ('; trigger: ' + _escape_attr(t.trigger) if t.trigger else '')
                for t in content.targets]
    if kind is FieldKind.OUTPUT:
        lines = ['- section: ' + s for s in content.required_sections]
        if content.max_words is not None:
            lines.append('- max_words: {}'.format(content.max_words))
        if content.language:
            lines.append('- language: ' + content.language)
        return lines
    return []


def render_field_body(kind, content):
    """
    Render a field's content as a section body: prose, a blank line, then the structured bullets.
    :param kind: FieldKind
    :param content: FieldContent
    :return: str
    """
    parts = []
    if content.text:
        parts.append(_escape_lines(content.text, _misread_in(kind)))
    entries = _entry_lines(kind, content)
    if entries:
        parts.append('\n'.join(entries))
    return '\n\n'.join(parts)


def import_skill(doc, aliases=None):
    """
    Read the contract fields out of a parsed SKILL.md.
    :param doc: SkillDocument; Parsed document.
    :param aliases: Optional[Mapping[str, FieldKind]]; Normalized alias table, defaults to the built-in one.
    :return: TaskContract, List[Finding]; Findings report unrecognized, ambiguous and off-level sections and bullets
    that could not be read. None of them are fatal.
    """
    findings = []
    fields = {}
    spans = {}
    used = set()
    for kind in FieldKind:
        section = locate_section(doc, kind, aliases, findings)
        if section is None:
            continue
        used.add(id(section))
        if section.heading_level != FIELD_LEVEL:
            findings.append(Finding.make(
                'section.level', '"{}" is a level-{} heading'.format(section.heading_raw, section.heading_level),
                field=kind, location=section.source_span))
        content = parse_field_body(kind, section.body, section.source_span, findings)
        if content.is_empty():
            logger.debug('Section %r is empty; treating %s as absent', section.heading_raw, kind.display)
            continue
        fields[kind] = content
        spans[kind] = section.source_span

    extras = []
    for section in doc.sections:
        if id(section) in used:
            continue
        extras.append(ExtraSection(section.heading_raw, _unescape_lines(section.body)))
        if normalize_section_name(section.heading_raw, aliases) is None:
            findings.append(Finding.make(
                'section.unrecognized', 'Section "{}" is not a contract field; kept as an extra'.format(
                    section.heading_raw),
                location=section.source_span))

    logger.debug('Imported %d field(s) and %d extra section(s)', len(fields), len(extras))
    contract = TaskContract(doc.frontmatter, fields, tuple(extras), _unescape_lines(doc.preamble), spans)
    return contract, sort_findings(findings)


def emit_skill(contract):
    """
    Render a contract as a SKILL.md document: populated fields only, level-2 headings in canonical field order, then
    extras.
    :param contract: TaskContract
    :return: SkillDocument
    """
    sections = [SectionBlock(kind.display, FIELD_LEVEL, render_field_body(kind, content))
                for (kind, content) in contract.populated()]
    sections.extend(SectionBlock(extra.heading, FIELD_LEVEL, _escape_lines(extra.body, _misread_in(None)))
                    for extra in contract.extras)
    return SkillDocument(contract.metadata, _escape_preamble(contract.preamble), tuple(sections))


def _constraint_bullets(contract, limit=3):
    constraints = contract.get(FieldKind.CONSTRAINTS)
    if constraints is None:
        return []
    return [line.strip() for line in constraints.text.split('\n') if _BULLET.match(line)][:limit]


def derive_condition(contract, cond):
    """
    Produce the skill document for one instruction condition.

    NO_SKILL gives no document. MINIMAL keeps Goal and Workflow plus up to three Constraints bullets under a
    'Required Behavior' heading. PLAIN_EXPANDED carries every populated field body, in field order, as one
    untitled body with no contract headings; it is a mechanical approximation of a hand-written plain skill.
    CONTRACTUAL is `emit_skill`.
    :param contract: TaskContract
    :param cond: Condition
    :return: Optional[SkillDocument]
    """
    if cond is Condition.NO_SKILL:
        return None
    if cond is Condition.CONTRACTUAL:
        return emit_skill(contract)
    if cond is Condition.MINIMAL:
        sections = [SectionBlock(kind.display, FIELD_LEVEL, render_field_body(kind, contract.get(kind)))
                    for kind in (FieldKind.GOAL, FieldKind.WORKFLOW) if contract.has(kind)]
        behavior = _constraint_bullets(contract)
        if behavior:
            sections.append(SectionBlock(REQUIRED_BEHAVIOR, FIELD_LEVEL, '\n'.join(behavior)))
        return SkillDocument(contract.metadata, _escape_preamble(contract.preamble), tuple(sections))
    if cond is Condition.PLAIN_EXPANDED:
        bodies = [render_field_body(kind, content) for (kind, content) in contract.populated()]
        if contract.preamble.strip():
            bodies.insert(0, contract.preamble.strip())
        return SkillDocument(contract.metadata, '\n\n'.join(bodies), ())
    raise ValueError('Unknown condition {!r}'.format(cond))


# Contract source (YAML) -------------------------------------------------------------------------------------------

_TAG_STR = 'tag:yaml.org,2002:str'
_TAG_NULL = 'tag:yaml.org,2002:null'
_TAG_INT = 'tag:yaml.org,2002:int'
_TAG_BOOL = 'tag:yaml.org,2002:bool'
_FRONTMATTER_KEYS = ('name', 'description', 'template')
_FIELD_KEYS = {kind.key: kind for kind in FieldKind}


def _line(node):
    return node.start_mark.line + 1


def _string(node, key):
    if not isinstance(node, yaml.ScalarNode):
        raise ContractSourceError('"{}" must be a string'.format(key), _line(node), key)
    if node.tag == _TAG_NULL:
        return ''
    return node.value


def _int(node, key):
    if not isinstance(node, yaml.ScalarNode) or node.tag != _TAG_INT:
        raise ContractSourceError('"{}" must be an integer'.format(key), _line(node), key)
    try:
        value = int(node.value)
    except ValueError:
        raise ContractSourceError('"{}" must be a decimal integer'.format(key), _line(node), key)
    if value <= 0:
        raise ContractSourceError('"{}" must be positive'.format(key), _line(node), key)
    return value


def _bool(node, key):
    value = parse_bool(node.value) if isinstance(node, yaml.ScalarNode) and node.tag == _TAG_BOOL else None
    if value is None:
        raise ContractSourceError('"{}" must be true or false'.format(key), _line(node), key)
    return value


def _sequence(node, key):
    if not isinstance(node, yaml.SequenceNode):
        raise ContractSourceError('"{}" must be a list'.format(key), _line(node), key)
    return node.value


def _mapping(node, key, allowed, required=()):
    """
    :return: Dict[str, yaml.Node]; Value nodes by key.
    """
    if not isinstance(node, yaml.MappingNode):
        raise ContractSourceError('"{}" must be a mapping'.format(key), _line(node), key)
    values = {}
    for (key_node, value_node) in node.value:
        name = _string(key_node, key)
        if name in values:
            raise ContractSourceError('Duplicate key "{}" in "{}"'.format(name, key), _line(key_node), name)
        if name not in allowed:
            raise ContractSourceError('Unknown key "{}" in "{}"; expected one of {}'.format(
                name, key, ', '.join(allowed)), _line(key_node), name)
        values[name] = value_node
    for name in required:
        if name not in values:
            raise ContractSourceError('"{}" is missing "{}"'.format(key, name), _line(node), key)
    return values


def _strings(node, key):
    items = tuple(_string(n, key) for n in _sequence(node, key))
    for (n, item) in zip(node.value, items):
        if not item.strip():
            raise ContractSourceError('"{}" has an empty entry'.format(key), _line(n), key)
    return items


def _input_item(node, key):
    if isinstance(node, yaml.ScalarNode):
        return InputItem(_string(node, key))
    values = _mapping(node, key, ('name', 'required', 'path', 'privacy'), required=('name',))
    privacy = _string(values['privacy'], key + '.privacy') if 'privacy' in values else None
    if privacy is not None and privacy not in PRIVACY_CLASSES:
        raise ContractSourceError('Unknown privacy class "{}"; expected one of {}'.format(
            privacy, ', '.join(PRIVACY_CLASSES)), _line(values['privacy']), key)
    return InputItem(
        _string(values['name'], key + '.name'),
        _bool(values['required'], key + '.required') if 'required' in values else True,
        _string(values['path'], key + '.path') if 'path' in values else None,
        privacy,
    )


def _handoff_item(node, key):
    if isinstance(node, yaml.ScalarNode):
        return HandoffItem(_string(node, key))
    values = _mapping(node, key, ('to', 'when'), required=('to',))
    return HandoffItem(_string(values['to'], key + '.to'),
                       _string(values['when'], key + '.when') if 'when' in values else None)


def _listed(node, key, parse_item):
    """Item list, bare prose, or a `{text, items}` mapping."""
    if isinstance(node, yaml.ScalarNode):
        return _string(node, key), ()
    if isinstance(node, yaml.SequenceNode):
        return '', tuple(parse_item(n, key) for n in node.value)
    values = _mapping(node, key, ('text', 'items'))
    text = _string(values['text'], key + '.text') if 'text' in values else ''
    items = tuple(parse_item(n, key) for n in _sequence(values['items'], key + '.items')) if 'items' in values \
        else ()
    return text, items


def _parse_inputs(node, key):
    return InputsContent(*_listed(node, key, _input_item))


def _parse_gates(node, key):
    def gate(item, item_key):
        value = _string(item, item_key)
        if not value.strip():
            raise ContractSourceError('"{}" has an empty gate'.format(item_key), _line(item), item_key)
        return value
    return HumanGatesContent(*_listed(node, key, gate))


def _parse_handoff(node, key):
    return HandoffContent(*_listed(node, key, _handoff_item))


def _parse_permissions(node, key):
    if isinstance(node, yaml.ScalarNode):
        return PermissionsContent(_string(node, key))
    values = _mapping(node, key, ('text', 'allowed', 'forbidden'))
    return PermissionsContent(
        _string(values['text'], key + '.text') if 'text' in values else '',
        _strings(values['allowed'], key + '.allowed') if 'allowed' in values else (),
        _strings(values['forbidden'], key + '.forbidden') if 'forbidden' in values else (),
    )


def _parse_output(node, key):
    if isinstance(node, yaml.ScalarNode):
        return OutputContent(_string(node, key))
    values = _mapping(node, key, ('text', 'required_sections', 'max_words', 'language'))
    sections = _strings(values['required_sections'], key + '.required_sections') \
        if 'required_sections' in values else ()
    if len(set(sections)) != len(sections):
        raise ContractSourceError('"{}.required_sections" has duplicate titles'.format(key),
                                  _line(values['required_sections']), key)
    return OutputContent(
        _string(values['text'], key + '.text') if 'text' in values else '',
        sections,
        _int(values['max_words'], key + '.max_words') if 'max_words' in values else None,
        _string(values['language'], key + '.language') if 'language' in values else None,
    )


_FIELD_PARSERS = {
    FieldKind.INPUTS: _parse_inputs,
    FieldKind.PERMISSIONS: _parse_permissions,
    FieldKind.HUMAN_GATES: _parse_gates,
    FieldKind.HANDOFF: _parse_handoff,
    FieldKind.OUTPUT: _parse_output,
}


def _parse_extras(node):
    extras = []
    for item in _sequence(node, 'extras'):
        values = _mapping(item, 'extras', ('heading', 'body'), required=('heading',))
        if '\n' in _string(values['heading'], 'extras.heading'):
            raise ContractSourceError('"extras.heading" must be a single line', _line(values['heading']), 'extras')
        extras.append(ExtraSection(_string(values['heading'], 'extras.heading'),
                                   _string(values['body'], 'extras.body') if 'body' in values else ''))
    return tuple(extras)


def _frontmatter(entries):
    try:
        return Frontmatter([(k, v) for (k, v, _) in entries])
    except ValueError as err:
        lines = [line for (_, _, line) in entries]
        raise ContractSourceError(str(err), lines[0] if lines else None)


def parse_contract_source(text):
    """
    Parse a YAML contract source. Scalars are read as written, so `goal: yes` is the string 'yes'.
    :param text: str; Contract source text.
    :return: TaskContract
    :raises ContractSourceError: YAML syntax errors and schema errors (unknown key, wrong type), with line numbers.
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as err:
        mark = err.problem_mark or err.context_mark
        raise ContractSourceError('YAML syntax error: {}'.format(err.problem or err.context),
                                  mark.line + 1 if mark else None)
    if root is None:
        raise ContractSourceError('Contract source is empty', 1)
    if not isinstance(root, yaml.MappingNode):
        raise ContractSourceError('Contract source must be a mapping', _line(root))

    meta = []
    fields = {}
    extras = ()
    preamble = ''
    seen = set()
    for (key_node, value_node) in root.value:
        key = _string(key_node, 'key')
        line = _line(key_node)
        if key in seen:
            raise ContractSourceError('Duplicate key "{}"'.format(key), line, key)
        seen.add(key)
        if key in _FRONTMATTER_KEYS:
            meta.append((key, _string(value_node, key), line))
        elif key == 'metadata':
            if not isinstance(value_node, yaml.MappingNode):
                raise ContractSourceError('"metadata" must be a mapping', _line(value_node), key)
            for (meta_key, meta_value) in value_node.value:
                name = _string(meta_key, key)
                meta.append((name, _string(meta_value, name), _line(meta_key)))
        elif key == 'preamble':
            preamble = _string(value_node, key)
        elif key == 'extras':
            extras = _parse_extras(value_node)
        elif key in _FIELD_KEYS:
            kind = _FIELD_KEYS[key]
            parser = _FIELD_PARSERS.get(kind, lambda node, k: FieldContent(_string(node, k)))
            content = parser(value_node, key)
            if not content.is_empty():
                fields[kind] = content
        else:
            raise ContractSourceError('Unknown key "{}"'.format(key), line, key)

    contract = TaskContract(_frontmatter(meta), fields, extras, preamble)
    logger.debug('Parsed contract source for %r with %d field(s)', contract.name, len(fields))
    return contract


class _SourceDumper(yaml.SafeDumper):
    pass


def _represent_str(dumper, value):
    return dumper.represent_scalar(_TAG_STR, value, style='|' if '\n' in value else None)


_SourceDumper.add_representer(str, _represent_str)


def _emit_listed(text, items):
    if not text:
        return list(items)
    if not items:
        return text
    return {'text': text, 'items': list(items)}


def _emit_field(kind, content):
    if kind is FieldKind.INPUTS:
        items = []
        for item in content.items:
            entry = {'name': item.name}
            if not item.required:
                entry['required'] = False
            if item.path_hint is not None:
                entry['path'] = item.path_hint
            if item.privacy is not None:
                entry['privacy'] = item.privacy
            items.append(entry)
        return _emit_listed(content.text, items)
    if kind is FieldKind.HUMAN_GATES:
        return _emit_listed(content.text, content.gates)
    if kind is FieldKind.HANDOFF:
        return _emit_listed(content.text, [{'to': t.role, 'when': t.trigger} if t.trigger else {'to': t.role}
                                           for t in content.targets])
    if kind is FieldKind.PERMISSIONS and content.has_entries():
        out = {'text': content.text, 'allowed': list(content.allowed), 'forbidden': list(content.forbidden)}
        return {k: v for (k, v) in out.items() if v}
    if kind is FieldKind.OUTPUT and content.has_entries():
        out = {'text': content.text, 'required_sections': list(content.required_sections),
               'max_words': content.max_words, 'language': content.language}
        return {k: v for (k, v) in out.items() if v not in (None, '', [])}
    return content.text


def emit_contract_source(contract):
    """
    Write a contract as YAML contract source. `parse_contract_source` reads it back to an equal contract.
    :param contract: TaskContract
    :return: str
    """
    out = {}
    keys = list(contract.metadata)
    rest = [k for k in keys if k not in _FRONTMATTER_KEYS]
    first = keys.index(rest[0]) if rest else 0
    if keys[first:first + len(rest)] != rest:
        # interleaved keys only keep their order inside one metadata mapping
        out['metadata'] = dict(contract.metadata.items())
    for key in keys:
        if 'metadata' in out and key in out['metadata']:
            continue
        if key in _FRONTMATTER_KEYS:
            out[key] = contract.metadata[key]
        elif 'metadata' not in out:
            out['metadata'] = {k: contract.metadata[k] for k in rest}
    if contract.preamble:
        out['preamble'] = contract.preamble
    for (kind, content) in contract.populated():
        out[kind.key] = _emit_field(kind, content)
    if contract.extras:
        out['extras'] = [{'heading': e.heading, 'body': e.body} if e.body else {'heading': e.heading}
                         for e in contract.extras]
    return yaml.dump(out, Dumper=_SourceDumper, sort_keys=False, allow_unicode=True, default_flow_style=False,
                     width=1 << 20)


def load_contract(path, aliases=None):
    """
    Load a contract from a SKILL.md file (`.md`) or a YAML contract source (anything else).
    :param path: str; File to read.
    :param aliases: Optional[Mapping[str, FieldKind]]; Alias table used when importing a SKILL.md.
    :return: TaskContract, List[Finding]; Import findings, always empty for contract sources.
    """
    with open(path, encoding='utf-8') as file:
        text = file.read()
    if path.lower().endswith('.md'):
        return import_skill(parse_skill_markdown(text), aliases)
    return parse_contract_source(text), []

