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

import string

import pytest
from hypothesis import given, settings, strategies as st

from skillctl.compiler import *
from skillctl.contract import *
from skillctl.errors import ContractSourceError
from skillctl.fields import FieldKind, build_alias_table, normalize_section_name
from skillctl.skill_doc import Frontmatter, parse_skill_markdown, render_skill_markdown
from tests import fixture_path, read_fixture

SKILLS = ['sales-growth', 'finance-contract', 'code-review-pro', 'missing-handoff']


def _import(text, aliases=None):
    return import_skill(parse_skill_markdown(text), aliases)


def _skill(name):
    contract, _ = _import(read_fixture('skills', name, 'SKILL.md'))
    return contract


def test_parse_inputs_body():
    findings = []
    content = parse_field_body(FieldKind.INPUTS, 'Read these.\n\n- required: account_id; path: crm/accounts; '
                                                 'privacy: internal\n- optional: call_notes\n', findings=findings)
    assert content.text == 'Read these.'
    assert content.items == (InputItem('account_id', True, 'crm/accounts', 'internal'),
                             InputItem('call_notes', False))
    assert findings == []


def test_parse_output_body():
    content = parse_field_body(FieldKind.OUTPUT, '- section: Summary\n- section: Risks\n- max_words: 250\n'
                                                 '- language: de\n')
    assert content == OutputContent('', ('Summary', 'Risks'), 250, 'de')


def test_parse_permissions_and_gates():
    perms = parse_field_body(FieldKind.PERMISSIONS, '* allowed: read\n+ forbidden: write\n- allowed: draft')
    assert perms.allowed == ('read', 'draft')
    assert perms.forbidden == ('write',)
    gates = parse_field_body(FieldKind.HUMAN_GATES, 'Stop and ask.\n- gate: refunds')
    assert gates == HumanGatesContent('Stop and ask.', ('refunds',))


def test_parse_handoff_body():
    content = parse_field_body(FieldKind.HANDOFF, '- handoff: finance; trigger: payment terms\n- handoff: legal')
    assert content.targets == (HandoffItem('finance', 'payment terms'), HandoffItem('legal'))


@pytest.mark.parametrize('kind,line', [
    (FieldKind.HANDOFF, '- handoff: ; trigger: x'),
    (FieldKind.INPUTS, '- required: x; color: red'),
    (FieldKind.INPUTS, '- required: x; path: a; path: b'),
    (FieldKind.OUTPUT, '- max_words: many'),
    (FieldKind.OUTPUT, '- max_words: 0'),
    (FieldKind.PERMISSIONS, '- allowed:'),
])
def test_malformed_entries_stay_prose(kind, line):
    findings = []
    content = parse_field_body(kind, line, location=(4, 5), findings=findings)
    assert content.text == line
    assert not content.has_entries()
    assert [f.rule_id for f in findings] == ['import.entry.malformed']
    assert findings[0].location == (4, 5)


def test_duplicate_single_entries():
    findings = []
    content = parse_field_body(FieldKind.OUTPUT, '- max_words: 10\n- max_words: 20\n- section: A\n- section: A',
                               findings=findings)
    assert content.max_words == 10
    assert content.required_sections == ('A',)
    assert len(findings) == 2


def test_unknown_privacy_class_is_kept():
    findings = []
    content = parse_field_body(FieldKind.INPUTS, '- required: x; privacy: secret', findings=findings)
    assert content.items == (InputItem('x', True, None, 'secret'),)
    assert [f.rule_id for f in findings] == ['import.entry.malformed']


def test_unknown_bullets_are_prose():
    content = parse_field_body(FieldKind.HUMAN_GATES, '- note: not a gate\n- plain bullet')
    assert content.gates == ()
    assert content.text == '- note: not a gate\n- plain bullet'


def test_plain_field_body_is_stripped():
    assert parse_field_body(FieldKind.GOAL, '\n  Do it.  \n\n') == FieldContent('Do it.')


def test_render_field_body():
    content = PermissionsContent('Be careful.', ('read',), ('write',))
    assert render_field_body(FieldKind.PERMISSIONS, content) == 'Be careful.\n\n- allowed: read\n- forbidden: write'
    assert render_field_body(FieldKind.GOAL, FieldContent('Do it.')) == 'Do it.'
    inputs = InputsContent('', (InputItem('a', False, 'p', 'public'),))
    assert render_field_body(FieldKind.INPUTS, inputs) == '- optional: a; path: p; privacy: public'


def test_import_fixture():
    contract, findings = _import(read_fixture('skills', 'sales-growth', 'SKILL.md'))
    assert findings == []
    assert contract.preamble.startswith('\n# Sales Growth')
    assert contract.extras == ()
    assert contract.get(FieldKind.HANDOFF).targets[1] == HandoffItem('deal desk', 'non-standard terms')
    assert contract.get(FieldKind.OUTPUT).max_words == 400
    assert contract.get(FieldKind.OUTPUT).language == 'en'


def test_import_extras_and_levels():
    contract, findings = _import('# Goal\nDo it.\n# Notes\nKeep this.\n# Steps\n1. a\n')
    assert contract.get(FieldKind.GOAL).text == 'Do it.'
    assert contract.get(FieldKind.WORKFLOW).text == '1. a'
    assert contract.extras == (ExtraSection('Notes', 'Keep this.'),)
    assert sorted(f.rule_id for f in findings) == ['section.level', 'section.level', 'section.unrecognized']

    doc = emit_skill(contract)
    assert doc.headings() == ['Goal', 'Workflow', 'Notes']
    assert all(s.heading_level == 2 for s in doc.sections)


def test_import_with_user_aliases():
    text = '## Escalation Path\n- handoff: legal\n'
    contract, findings = _import(text)
    assert not contract.has(FieldKind.HANDOFF)
    assert [f.rule_id for f in findings] == ['section.unrecognized']

    contract, findings = _import(text, build_alias_table({'Escalation Path': 'handoff'}))
    assert contract.get(FieldKind.HANDOFF).targets == (HandoffItem('legal'),)
    assert findings == []


def test_import_ambiguous_keeps_second_as_extra():
    contract, findings = _import('## Human Gates\n- gate: a\n## Approval Gates\n- gate: b\n')
    assert contract.get(FieldKind.HUMAN_GATES).gates == ('a',)
    assert contract.extras == (ExtraSection('Approval Gates', '- gate: b'),)
    assert [f.rule_id for f in findings] == ['section.ambiguous']


def test_import_empty_section_is_absent():
    contract, _ = _import('## Goal\n\n## Workflow\n1. a\n')
    assert not contract.has(FieldKind.GOAL)
    assert FieldKind.GOAL not in contract.fields


@pytest.mark.parametrize('skill', SKILLS)
def test_emit_import_round_trip(skill):
    contract = _skill(skill)
    again, findings = _import(render_skill_markdown(emit_skill(contract)))
    assert again == contract
    assert findings == []


def test_emit_orders_fields():
    doc = emit_skill(_skill('sales-growth'))
    assert doc.headings() == [kind.display for kind in FieldKind]


@pytest.mark.parametrize('value,expected', [
    ('no-skill', Condition.NO_SKILL),
    ('NoSkill', Condition.NO_SKILL),
    ('none', Condition.NO_SKILL),
    ('minimal', Condition.MINIMAL),
    ('plain', Condition.PLAIN_EXPANDED),
    ('Plain Expanded', Condition.PLAIN_EXPANDED),
    ('contractual', Condition.CONTRACTUAL),
    ('verbose', None),
])
def test_condition_parse(value, expected):
    assert Condition.parse(value) is expected


def test_derive_no_skill():
    assert derive_condition(_skill('sales-growth'), Condition.NO_SKILL) is None


def test_derive_minimal():
    doc = derive_condition(_skill('sales-growth'), Condition.MINIMAL)
    assert doc.headings() == ['Goal', 'Workflow', REQUIRED_BEHAVIOR]
    assert doc.sections[2].body == ('- Never state a final price or approve a discount.\n'
                                    '- Never promise delivery dates or extra scope.\n'
                                    '- Keep customer contact details out of the brief.')
    assert doc.frontmatter['name'] == 'sales-growth'


def test_derive_minimal_without_constraints():
    contract, _ = _import('## Goal\nDo it.\n## Constraints\nBe nice.\n')
    assert derive_condition(contract, Condition.MINIMAL).headings() == ['Goal']


def test_derive_plain_expanded():
    contract = _skill('sales-growth')
    doc = derive_condition(contract, Condition.PLAIN_EXPANDED)
    assert doc.sections == ()
    assert doc.preamble.startswith('# Sales Growth')
    assert '- forbidden: send email to the customer' in doc.preamble
    assert 'Route commercial decisions to the owning role.' in doc.preamble
    assert parse_skill_markdown(render_skill_markdown(doc)).sections == ()


def test_derive_contractual():
    contract = _skill('finance-contract')
    assert derive_condition(contract, Condition.CONTRACTUAL) == emit_skill(contract)


def test_parse_minimal_source():
    contract = parse_contract_source(read_fixture('sources', 'minimal.yml'))
    assert contract.name == 'quick-summary'
    assert list(contract.fields) == [FieldKind.GOAL]
    assert contract.variant is TemplateVariant.BUSINESS_PROCESS


def test_parse_full_source():
    contract = parse_contract_source(read_fixture('sources', 'deal-desk.yml'))
    assert contract.metadata['owner'] == 'revenue-operations'
    assert contract.variant is TemplateVariant.TOOL_OPERATION
    assert contract.get(FieldKind.INPUTS).items == (InputItem('deal_id', True, None, 'internal'),
                                                    InputItem('competitor_quote', False, None, 'confidential'))
    assert contract.get(FieldKind.PERMISSIONS).forbidden == ('approve discounts', 'edit contracts')
    assert contract.get(FieldKind.OUTPUT).required_sections == ('Request', 'Justification', 'Approval Needed')
    assert contract.get(FieldKind.OUTPUT).max_words == 300
    assert contract.get(FieldKind.HANDOFF).targets == (HandoffItem('deal desk', 'discount request ready'),)
    assert contract.get(FieldKind.WORKFLOW).text.startswith('1. Look up the deal')
    assert validate_contract(contract) == []


def test_bad_schema_source():
    with pytest.raises(ContractSourceError) as err:
        parse_contract_source(read_fixture('sources', 'bad-schema.yml'))
    assert err.value.line == 4
    assert err.value.key == 'approvers'


@pytest.mark.parametrize('text,line', [
    ('name: x\ngoal: [a, b]\n', 2),
    ('name: x\nname: y\n', 2),
    ('name: x\n\tgoal: y\n', 2),
    ('- a\n- b\n', 1),
    ('', 1),
    ('name: x\noutput:\n  max_words: ten\n', 3),
    ('name: x\noutput:\n  max_words: 0\n', 3),
    ('name: x\noutput:\n  required_sections: [A, A]\n', 3),
    ('name: x\ninputs:\n  - name: a\n    privacy: secret\n', 4),
    ('name: x\ninputs:\n  - name: a\n    required: maybe\n', 4),
    ('name: x\ninputs:\n  - path: a\n', 3),
    ('name: x\nhandoff:\n  - to: legal\n    cc: finance\n', 4),
    ('name: x\npermissions:\n  allowed: ["  "]\n', 3),
    ('name: x\nmetadata: [a]\n', 2),
])
def test_source_errors_have_lines(text, line):
    with pytest.raises(ContractSourceError) as err:
        parse_contract_source(text)
    assert err.value.line == line


def test_source_scalars_are_strings():
    contract = parse_contract_source('name: x\ngoal: yes\nwhen_to_use: 12\n')
    assert contract.get(FieldKind.GOAL).text == 'yes'
    assert contract.get(FieldKind.WHEN_TO_USE).text == '12'


def test_source_empty_field_is_absent():
    contract = parse_contract_source('name: x\ngoal: ""\nhandoff: []\n')
    assert contract.fields == {}


@pytest.mark.parametrize('skill', SKILLS)
def test_source_round_trip_fixture(skill):
    contract = _skill(skill)
    assert parse_contract_source(emit_contract_source(contract)) == contract


def test_source_round_trip_deal_desk():
    contract = parse_contract_source(read_fixture('sources', 'deal-desk.yml'))
    assert parse_contract_source(emit_contract_source(contract)) == contract


def test_compile_and_import_agree():
    source = parse_contract_source(read_fixture('sources', 'deal-desk.yml'))
    imported, findings = _import(render_skill_markdown(emit_skill(source)))
    assert findings == []
    assert imported == source


def _meta(*keys):
    return Frontmatter([(k, k + ' value') for k in keys])


@pytest.mark.parametrize('keys', [
    ('name', 'description', 'owner'),
    ('owner', 'name', 'description'),
    ('name', 'owner', 'description'),
    ('name', 'owner', 'description', 'team'),
    ('template', 'owner', 'team', 'name', 'description'),
])
def test_source_keeps_frontmatter_order(keys):
    contract = TaskContract(_meta(*keys), {FieldKind.GOAL: FieldContent('g')})
    again = parse_contract_source(emit_contract_source(contract))
    assert list(again.metadata) == list(keys)
    assert again == contract


def test_source_metadata_may_hold_name():
    contract = parse_contract_source('metadata:\n  owner: ops\n  name: x\n  description: y\ngoal: g\n')
    assert list(contract.metadata) == ['owner', 'name', 'description']
    assert contract.name == 'x'
    with pytest.raises(ContractSourceError):
        parse_contract_source('name: x\ndescription: y\nmetadata:\n  name: z\n')


def test_semicolons_in_entries_round_trip():
    contract = TaskContract(_meta('name', 'description'), {
        FieldKind.HANDOFF: HandoffContent('', (HandoffItem(';'), HandoffItem('legal; tax', 'a;b'))),
        FieldKind.INPUTS: InputsContent('', (InputItem('a;b', True, 'c:\\data;x\\', 'internal'),
                                             InputItem('plain\\;name', False))),
    })
    text = render_skill_markdown(emit_skill(contract))
    assert '- handoff: \\;\n' in text
    assert '- handoff: legal\\; tax; trigger: a\\;b\n' in text
    again, findings = _import(text)
    assert findings == []
    assert again.get(FieldKind.HANDOFF) == contract.get(FieldKind.HANDOFF)
    assert again.get(FieldKind.INPUTS) == contract.get(FieldKind.INPUTS)


def test_escaped_attributes_are_read():
    content = parse_field_body(FieldKind.HANDOFF, '- handoff: R\\&D\\; ops; trigger: path C:\\\\tmp')
    assert content.targets == (HandoffItem('R\\&D; ops', 'path C:\\tmp'),)


def test_markup_like_prose_round_trips():
    gates = HumanGatesContent('Ask first.\n- gate: written like a gate\n## Not a heading\n\\- already escaped',
                              ('refunds',))
    contract = TaskContract(
        _meta('name', 'description'),
        {FieldKind.HUMAN_GATES: gates, FieldKind.GOAL: FieldContent('# One\n### Deeper stays\n- gate: fine here')},
        (ExtraSection('Notes', '## Inner\ntext'),),
        '# Title\n## Sub\nIntro.')
    text = render_skill_markdown(emit_skill(contract))
    assert '\n# Title\n\\## Sub\nIntro.\n' in text
    assert '\n\\- gate: written like a gate\n\\## Not a heading\n\\\\- already escaped\n' in text
    assert '\n\\# One\n### Deeper stays\n- gate: fine here\n' in text
    doc = parse_skill_markdown(text)
    assert [s.heading_raw for s in doc.sections] == ['Goal', 'Human Gates', 'Notes']
    again, findings = _import(text)
    assert [f.rule_id for f in findings] == ['section.unrecognized']
    assert again == contract


def test_source_extras_heading_single_line():
    with pytest.raises(ContractSourceError) as err:
        parse_contract_source('name: x\ndescription: y\nextras:\n  - heading: "a\\nb"\n')
    assert err.value.line == 4


def test_fenced_bullets_are_prose():
    content = parse_field_body(FieldKind.HUMAN_GATES, 'Example:\n```\n- gate: quoted\n\\- kept\n```\n- gate: real')
    assert content.gates == ('real',)
    assert content.text == 'Example:\n```\n- gate: quoted\n\\- kept\n```'


def test_load_contract(tmp_path):
    contract, findings = load_contract(fixture_path('skills', 'sales-growth', 'SKILL.md'))
    assert contract.name == 'sales-growth'
    assert findings == []
    contract, findings = load_contract(fixture_path('sources', 'deal-desk.yml'))
    assert contract.name == 'deal-desk'
    assert findings == []


_ALPHABET = string.ascii_letters + string.digits + ' .,:;-#\'"?!()'
_line = st.text(alphabet=_ALPHABET, min_size=1, max_size=30).map(str.strip).filter(bool)
_text = st.lists(_line, min_size=1, max_size=4).map('\n'.join)
_maybe = st.one_of(st.none(), _line)


def _content(kind):
    if kind is FieldKind.INPUTS:
        privacy = st.one_of(st.none(), st.sampled_from(PRIVACY_CLASSES))
        item = st.builds(InputItem, _line, st.booleans(), _maybe, privacy)
        return st.builds(InputsContent, st.one_of(st.just(''), _text), st.lists(item, max_size=3).map(tuple))
    if kind is FieldKind.PERMISSIONS:
        items = st.lists(_line, max_size=3).map(tuple)
        return st.builds(PermissionsContent, st.one_of(st.just(''), _text), items, items)
    if kind is FieldKind.HUMAN_GATES:
        return st.builds(HumanGatesContent, st.one_of(st.just(''), _text), st.lists(_line, max_size=3).map(tuple))
    if kind is FieldKind.HANDOFF:
        item = st.builds(HandoffItem, _line, _maybe)
        return st.builds(HandoffContent, st.one_of(st.just(''), _text), st.lists(item, max_size=3).map(tuple))
    if kind is FieldKind.OUTPUT:
        sections = st.lists(_line, max_size=4, unique=True).map(tuple)
        return st.builds(OutputContent, st.one_of(st.just(''), _text), sections,
                         st.one_of(st.none(), st.integers(min_value=1, max_value=5000)), _maybe)
    return st.builds(FieldContent, _text)


@st.composite
def contracts(draw):
    meta = [('name', draw(_line)), ('description', draw(_line))]
    if draw(st.booleans()):
        meta.append(('template', draw(st.sampled_from([v.value for v in TemplateVariant]))))
    for key in ('owner', 'team'):
        if draw(st.booleans()):
            meta.append((key, draw(_line)))
    meta = draw(st.permutations(meta))
    fields = {}
    for kind in draw(st.sets(st.sampled_from(list(FieldKind)))):
        content = draw(_content(kind))
        if not content.is_empty():
            fields[kind] = content
    heading = _line.filter(lambda h: normalize_section_name(h) is None)
    extras = draw(st.lists(st.builds(ExtraSection, heading, st.one_of(st.just(''), _text)), max_size=2).map(tuple))
    preamble = draw(st.one_of(st.just(''), _text))
    return TaskContract(Frontmatter(meta), fields, extras, preamble)


@settings(max_examples=150, deadline=None)
@given(contracts())
def test_source_round_trip(contract):
    assert parse_contract_source(emit_contract_source(contract)) == contract


@settings(max_examples=150, deadline=None)
@given(contracts())
def test_markdown_round_trip(contract):
    again, _ = _import(render_skill_markdown(emit_skill(contract)))
    for kind in FieldKind:
        assert again.get(kind) == contract.get(kind)
    assert again == contract
