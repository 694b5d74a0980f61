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

""" Lossless parsing and rendering of SKILL.md files: a flat frontmatter block plus a sectioned Markdown body.

Section boundaries follow heading levels: a section runs until the next heading of the same or a higher level, so
sub-headings stay inside their parent's body. Headings inside fenced code blocks are ignored. When the first heading
of the body is a level-1 heading and no other level-1 heading follows, it is the document title and stays in the
preamble. A heading written with closing hashes (`# Goal #`) is never taken as the title; the renderer closes a lone
leading level-1 section that way so it reads back as a section.
"""

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Optional, Tuple

from logzero import logger

from skillctl.errors import MalformedFrontmatter
from skillctl.fields import normalize_section_name
from skillctl.findings import Finding

_DELIMITER = '---'
_QUOTES = ('"', "'")
_KEY = re.compile(r'^[A-Za-z0-9_][A-Za-z0-9_.-]*$')
_KEY_VALUE = re.compile(r'^([A-Za-z0-9_][A-Za-z0-9_.-]*):(?:[ \t]+(.*?))?[ \t]*$')
_HEADING = re.compile(r'^(#{1,6})(?:[ \t]+(.*?))?[ \t]*$')
_CLOSING_HASHES = re.compile(r'(?:^|[ \t]+)#+$')
_FENCE = re.compile(r'^ {0,3}(`{3,}|~{3,})')


class Frontmatter(Mapping):
    """
    Ordered, immutable map of flat string frontmatter entries such as `name` and `description`.
    """

    def __init__(self, entries=()):
        """
        :param entries: Union[Mapping[str, str], Iterable[Tuple[str, str]]]; Entries in source order.
        """
        items = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
        seen = set()
        for (key, value) in items:
            if not isinstance(key, str) or not _KEY.match(key):
                raise ValueError('Invalid frontmatter key {!r}'.format(key))
            if key in seen:
                raise ValueError('Duplicate frontmatter key {!r}'.format(key))
            if not isinstance(value, str) or '\n' in value:
                raise ValueError('Frontmatter value for {!r} must be a single-line string'.format(key))
            seen.add(key)
        self._items = tuple(items)
        self._map = dict(items)

    def __getitem__(self, key):
        return self._map[key]

    def __iter__(self):
        return (key for (key, _) in self._items)

    def __len__(self):
        return len(self._items)

    def __eq__(self, other):
        if isinstance(other, Frontmatter):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        return 'Frontmatter({!r})'.format(list(self._items))

    def replace(self, key, value):
        """
        :return: Frontmatter; Copy with `key` set to `value` (appended when new).
        """
        if key in self._map:
            return Frontmatter([(k, value if k == key else v) for (k, v) in self._items])
        return Frontmatter(self._items + ((key, value),))

    def serialize(self):
        return dict(self._items)


@dataclass(frozen=True)
class SectionBlock:
    """
    One titled section of a SKILL.md body.

    heading_raw: str; Heading text as written (without the hashes and surrounding whitespace).
    heading_level: int; Number of leading hashes.
    body: str; Verbatim text between the heading line and the end of the section, without the final line break.
    source_span: Tuple[int, int]; 1-based (start_line, end_line) of the heading and its body in the parsed text.
    """
    heading_raw: str
    heading_level: int
    body: str
    source_span: Tuple[int, int] = field(default=(0, 0), compare=False)

    def __post_init__(self):
        if not 1 <= self.heading_level <= 6:
            raise ValueError('Heading level must be between 1 and 6')
        if '\n' in self.heading_raw:
            raise ValueError('Heading text must be a single line')
        if self.source_span[0] > self.source_span[1]:
            raise ValueError('Section span ends before it starts')

    def render_heading(self, closed=False):
        """
        :param closed: bool; Append closing hashes. Always done when the text itself ends in a run of hashes that
        would otherwise be read as closing hashes.
        :return: str
        """
        hashes = '#' * self.heading_level
        if closed or _CLOSING_HASHES.search(self.heading_raw):
            return '{} {} #'.format(hashes, self.heading_raw) if self.heading_raw else hashes + ' #'
        return '{} {}'.format(hashes, self.heading_raw) if self.heading_raw else hashes


@dataclass(frozen=True)
class SkillDocument:
    """
    Parsed SKILL.md file.

    frontmatter: Frontmatter; Discovery metadata.
    preamble: str; Body text before the first section (includes a document title heading, if any).
    sections: Tuple[SectionBlock, ...]; Sections in source order.
    """
    frontmatter: Frontmatter = field(default_factory=Frontmatter)
    preamble: str = ''
    sections: Tuple[SectionBlock, ...] = ()

    def headings(self):
        return [s.heading_raw for s in self.sections]


def _split_lines(text):
    text = text.replace('\r\n', '\n').replace('\r', '\n')
    if text.startswith('\ufeff'):
        text = text[1:]
    if not text:
        return []
    lines = text.split('\n')
    if text.endswith('\n'):
        lines.pop()
    return lines


def _unquote(value):
    if len(value) >= 2 and value[0] == value[-1] and value[0] in _QUOTES:
        return value[1:-1]
    return value


def _needs_quotes(value):
    return value != value.strip() or value[:1] in _QUOTES or value[-1:] in _QUOTES


def _parse_frontmatter(lines):
    """
    :return: Frontmatter, int; Parsed entries and the index of the first body line.
    """
    if not lines or lines[0].rstrip() != _DELIMITER:
        return Frontmatter(), 0

    closing = None
    for index in range(1, len(lines)):
        if lines[index].rstrip() == _DELIMITER:
            closing = index
            break
    if closing is None:
        raise MalformedFrontmatter('Frontmatter opened with --- but never closed', line=1)

    entries = []
    seen = set()
    for index in range(1, closing):
        line = lines[index]
        if not line.strip():
            continue
        match = _KEY_VALUE.match(line)
        if not match:
            raise MalformedFrontmatter('Expected a flat `key: value` line, got {!r}'.format(line), line=index + 1)
        key = match[1]
        if key in seen:
            raise MalformedFrontmatter('Duplicate frontmatter key {!r}'.format(key), line=index + 1)
        seen.add(key)
        entries.append((key, _unquote(match[2] or '')))
    return Frontmatter(entries), closing + 1


def unfenced_lines(lines, offset=0):
    """
    Walk the lines that sit outside fenced code blocks. Fence delimiter lines count as fenced.
    :param lines: Sequence[str]
    :param offset: int; Index of the first line to look at.
    :return: Iterator[Tuple[int, str]]; (line index, line).
    """
    fence = None
    for (index, line) in enumerate(lines[offset:], start=offset):
        fence_match = _FENCE.match(line)
        if fence_match:
            marker = fence_match[1]
            if fence is None:
                fence = marker
            elif marker[0] == fence[0] and len(marker) >= len(fence) and not line.strip()[len(marker):].strip():
                fence = None
            continue
        if fence is None:
            yield index, line


def heading_level(line):
    """
    :param line: str
    :return: Optional[int]; Level of the ATX heading on the line, None when it is not a heading.
    """
    match = _HEADING.match(line)
    return len(match[1]) if match else None


def heading_is_closed(line):
    """
    :param line: str; An ATX heading line.
    :return: bool; Whether the heading ends with closing hashes.
    """
    match = _HEADING.match(line)
    return bool(match and _CLOSING_HASHES.search(match[2] or ''))


def _find_headings(lines, offset):
    """
    Locate ATX headings outside fenced code blocks.
    :return: List[Tuple[int, int, str, bool]]; (line index, level, heading text, written with closing hashes).
    """
    headings = []
    for (index, line) in unfenced_lines(lines, offset):
        match = _HEADING.match(line)
        if match:
            text = match[2] or ''
            closed = bool(_CLOSING_HASHES.search(text))
            headings.append((index, len(match[1]), _CLOSING_HASHES.sub('', text), closed))
    return headings


def parse_skill_markdown(text):
    """
    Parse a SKILL.md file. Line endings are normalized to '\\n' first.
    :param text: str; File contents.
    :return: SkillDocument
    :raises MalformedFrontmatter: Unclosed block, duplicate key or a line that is not `key: value`.
    """
    lines = _split_lines(text)
    frontmatter, start = _parse_frontmatter(lines)
    headings = _find_headings(lines, start)

    if headings and headings[0][1] == 1 and not headings[0][3] and all(h[1] != 1 for h in headings[1:]):
        headings = headings[1:]  # document title

    starts = []
    current_level = None
    for (index, level, heading, _) in headings:
        if current_level is None or level <= current_level:
            starts.append((index, level, heading))
            current_level = level

    first = starts[0][0] if starts else len(lines)
    preamble = '\n'.join(lines[start:first])

    sections = []
    for (n, (index, level, heading)) in enumerate(starts):
        end = starts[n + 1][0] if n + 1 < len(starts) else len(lines)
        body = '\n'.join(lines[index + 1:end])
        sections.append(SectionBlock(heading, level, body, (index + 1, max(index + 1, end))))
        logger.debug('Section %r (level %d) spans lines %d-%d', heading, level, index + 1, max(index + 1, end))

    return SkillDocument(frontmatter, preamble, tuple(sections))


def render_skill_markdown(doc):
    """
    Render a SkillDocument back to SKILL.md text. Deterministic: equal documents render to identical strings.
    :param doc: SkillDocument; Document to render.
    :return: str; SKILL.md text ending with a newline.
    """
    out = []
    first_line = _split_lines(doc.preamble)[:1]
    preamble_opens_block = bool(first_line) and first_line[0].rstrip() == _DELIMITER
    if doc.frontmatter or preamble_opens_block:
        out.append(_DELIMITER + '\n')
        for (key, value) in doc.frontmatter.items():
            if _needs_quotes(value):
                value = '"{}"'.format(value)
            out.append('{}: {}\n'.format(key, value) if value else '{}:\n'.format(key))
        out.append(_DELIMITER + '\n')
    if doc.preamble:
        out.append(doc.preamble + '\n')
    levels = [s.heading_level for s in doc.sections]
    lone_top = bool(levels) and levels[0] == 1 and 1 not in levels[1:]
    for (n, section) in enumerate(doc.sections):
        out.append(section.render_heading(closed=lone_top and n == 0) + '\n')
        if section.body:
            out.append(section.body + '\n')
    return ''.join(out)


def locate_section(doc, canonical, aliases=None, findings=None):
    """
    Find the section holding a contract field, tolerating heading variants.
    :param doc: SkillDocument; Parsed document.
    :param canonical: FieldKind; Field to look for.
    :param aliases: Optional[Mapping[str, FieldKind]]; Normalized alias table.
    :param findings: Optional[List[Finding]]; Receives a `section.ambiguous` finding when more than one section maps
    to the field.
    :return: Optional[SectionBlock]; The first matching section.
    """
    matches = [s for s in doc.sections if normalize_section_name(s.heading_raw, aliases) is canonical]
    if not matches:
        return None
    if len(matches) > 1:
        logger.warning('%d sections map to %s; using %r', len(matches), canonical.display, matches[0].heading_raw)
        if findings is not None:
            for extra in matches[1:]:
                findings.append(Finding.make(
                    'section.ambiguous',
                    'Section "{}" also maps to {}; "{}" is used'.format(
                        extra.heading_raw, canonical.display, matches[0].heading_raw),
                    field=canonical, location=extra.source_span))
    return matches[0]


def read_skill_file(path):
    """
    Read and parse a SKILL.md file.
    :param path: str; File to read.
    :return: SkillDocument
    """
    with open(path, encoding='utf-8') as file:
        return parse_skill_markdown(file.read())


def write_skill_file(path, doc):
    """
    Render and write a SKILL.md file.
    :param path: str; Destination.
    :param doc: SkillDocument; Document to write.
    """
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        file.write(render_skill_markdown(doc))
