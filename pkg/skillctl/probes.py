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

""" Chaos toolkit interface for probes.

Each probe returns a report dictionary that a steady-state hypothesis can assert on, e.g. `errors == 0` for a
skill or `critical == false` for an output.
"""

from typing import Any, Dict, List, Optional

from chaoslib.types import Configuration

from skillctl import checker
from skillctl.cli import lint_file, skill_files
from skillctl.compiler import load_contract
from skillctl.contract import TemplateVariant
from skillctl.ctk import run_ctk
from skillctl.findings import Severity
from skillctl.rules import load_ruleset
from skillctl.tools.audit import aggregate_audits, audit_transcript
from skillctl.tools.registry import load_registry
from skillctl.tools.transcript import read_transcripts


def lint_skill(path: str, configuration: Configuration = None, template: Optional[str] = None) -> Dict[str, Any]:
    """
    Lint a SKILL.md file or every SKILL.md under a directory.
    :param path: str; File or directory.
    :param configuration: Configuration; Configuration details, see `README.md`.
    :param template: Optional[str]; Template variant overriding the frontmatter.
    :return: Dict[str, Any]; Finding counts by severity and the serialized findings.
    """
    def probe():
        ruleset = load_ruleset()
        variant = TemplateVariant.parse(template) if template else None
        findings = [f for p in skill_files([path]) for f in lint_file(p, ruleset, variant)]
        result = {s.value + 's': sum(1 for f in findings if f.severity is s) for s in Severity}
        result['findings'] = [f.serialize() for f in findings]
        return result

    return run_ctk(probe, configuration, "Linting {}...".format(path))


def check_output(output: str, skill: str, configuration: Configuration = None) -> Dict[str, Any]:
    """
    Check one agent output against the output contract compiled from a skill.
    :param output: str; Output file.
    :param skill: str; SKILL.md or contract source.
    :param configuration: Configuration; Configuration details, see `README.md`.
    :return: Dict[str, Any]; The serialized check report.
    """
    def probe():
        ruleset = load_ruleset()
        contract, _ = load_contract(skill, ruleset.alias_table())
        oc = checker.compile_output_contract(contract, ruleset)
        with open(output, encoding='utf-8') as file:
            return checker.check_output(file.read(), oc, ruleset).serialize()

    return run_ctk(probe, configuration, "Checking {} against {}...".format(output, skill))


def audit_transcripts(paths: List[str], configuration: Configuration = None, registry: Optional[str] = None) ->\
        Dict[str, Any]:
    """
    Audit tool-challenge transcripts for high-risk attempts and false completions.
    :param paths: List[str]; Transcript JSONL files.
    :param configuration: Configuration; Configuration details, see `README.md`.
    :param registry: Optional[str]; Tool registry YAML, defaults to the packaged registry.
    :return: Dict[str, Any]; Totals and the attempt matrix.
    """
    def probe():
        ruleset = load_ruleset()
        tools = load_registry(registry)
        reports = [audit_transcript(t, tools, ruleset) for p in sorted(paths) for t in read_transcripts(p)]
        matrix = aggregate_audits(reports, expected_per_model=0)
        return {
            'transcripts': len(reports),
            'high_risk_attempts': sum(r.high_risk_attempts for r in reports),
            'false_completions': sum(1 for r in reports if r.false_completion),
            'matrix': matrix.serialize(),
        }

    return run_ctk(probe, configuration, "Auditing {} transcript file(s)...".format(len(paths)))
