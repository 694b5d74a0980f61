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

""" Run manifests and the experiment arithmetic check: factor counts must multiply to the declared totals and the
data files must hold the declared number of rows.
"""

import os
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Tuple

import yaml
from logzero import logger

from skillctl.errors import ManifestError
from skillctl.metrics.aggregate import counterpart
from skillctl.metrics.records import dedup_records, read_judge_records
from skillctl.tools.transcript import read_transcripts

JUDGE = 'judge'
TRANSCRIPTS = 'transcripts'
CROSS = 'cross'
COMPLETE = 'complete'


@dataclass(frozen=True)
class Study:
    """
    One study of a run manifest.

    kind: str; 'judge' for judge-record CSV files, 'transcripts' for tool-challenge JSON Lines files.
    judging: str; 'cross' (no self-judging, the two judges judge each other's outputs once) or 'complete' (every judge
    scores every output).
    factors: Dict[str, int]; Per-model design factors, e.g. skills, tasks, conditions, repeats.
    declared: Dict[str, int]; Totals the study claims: outputs_per_model, outputs_total, judge_rows_total,
    rows_per_judge_file, records_per_model, records_total.
    files: Tuple[str, ...]; Data files, relative to the manifest.
    """
    name: str
    kind: str = JUDGE
    judging: str = COMPLETE
    factors: Dict[str, int] = field(default_factory=dict)
    models: Tuple[str, ...] = ()
    judges: Tuple[str, ...] = ()
    declared: Dict[str, int] = field(default_factory=dict)
    files: Tuple[str, ...] = ()

    @property
    def outputs_per_model(self):
        return reduce(lambda a, b: a * b, self.factors.values(), 1)

    @property
    def outputs_total(self):
        return self.outputs_per_model * len(self.models)

    def judges_for(self, model):
        """
        :return: int; Judges that score an output of `model`.
        """
        if self.judging == CROSS:
            if counterpart(model, self.judges) is not None:
                return 1
            return sum(1 for j in self.judges if j != model)
        return len(self.judges)

    @property
    def judge_rows_total(self):
        return sum(self.judges_for(m) * self.outputs_per_model for m in self.models)


@dataclass(frozen=True)
class Check:
    study: str
    name: str
    expected: int
    actual: int

    @property
    def ok(self):
        return self.expected == self.actual

    def serialize(self):
        return {'study': self.study, 'check': self.name, 'expected': self.expected, 'actual': self.actual,
                'ok': self.ok}


@dataclass(frozen=True)
class ManifestReport:
    checks: Tuple[Check, ...]

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    @property
    def mismatches(self):
        return [c for c in self.checks if not c.ok]

    def serialize(self):
        return {'ok': self.ok, 'checks': [c.serialize() for c in self.checks]}


def _ints(obj, key, study):
    value = obj.get(key) or {}
    if not isinstance(value, dict) or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0
                                              for v in value.values()):
        raise ManifestError('Study {}: "{}" must map names to non-negative integers'.format(study, key))
    return {str(k): v for (k, v) in value.items()}


def _names(obj, key, study):
    value = obj.get(key) or []
    if not isinstance(value, list):
        raise ManifestError('Study {}: "{}" must be a list'.format(study, key))
    return tuple(str(v) for v in value)


def study_from_dict(obj):
    if not isinstance(obj, dict) or not obj.get('name'):
        raise ManifestError('Every study needs a name')
    name = str(obj['name'])
    study = Study(
        name=name,
        kind=str(obj.get('kind', JUDGE)),
        judging=str(obj.get('judging', COMPLETE)),
        factors=_ints(obj, 'factors', name),
        models=_names(obj, 'models', name),
        judges=_names(obj, 'judges', name),
        declared=_ints(obj, 'declared', name),
        files=_names(obj, 'files', name),
    )
    if study.kind not in (JUDGE, TRANSCRIPTS):
        raise ManifestError('Study {}: unknown kind {!r}'.format(name, study.kind))
    if study.judging not in (CROSS, COMPLETE):
        raise ManifestError('Study {}: unknown judging mode {!r}'.format(name, study.judging))
    if study.judging == CROSS and len(study.judges) != 2:
        raise ManifestError('Study {}: cross judging needs exactly two judges'.format(name))
    return study


def load_manifest(path):
    """
    :param path: str; Manifest YAML with a `studies` list.
    :return: List[Study]
    """
    try:
        with open(path, encoding='utf-8') as file:
            obj = yaml.safe_load(file) or {}
    except yaml.YAMLError as err:
        raise ManifestError('{}: {}'.format(path, err))
    studies = obj.get('studies') if isinstance(obj, dict) else None
    if not isinstance(studies, list):
        raise ManifestError('{}: expected a "studies" list'.format(path))
    return [study_from_dict(s) for s in studies]


def _declared(checks, study, name, computed):
    if name in study.declared:
        checks.append(Check(study.name, name, study.declared[name], computed))


def _judge_file_checks(checks, study, base_dir):
    total = 0
    for path in study.files:
        records, _ = dedup_records(read_judge_records(os.path.join(base_dir, path)))
        total += len(records)
        if study.judging == COMPLETE:
            expected = study.declared.get('rows_per_judge_file', study.outputs_total)
            checks.append(Check(study.name, 'rows:' + path, expected, len(records)))
    checks.append(Check(study.name, 'rows:total', study.declared.get('judge_rows_total', study.judge_rows_total),
                        total))


def _transcript_file_checks(checks, study, base_dir):
    per_model = {}
    for path in study.files:
        for transcript in read_transcripts(os.path.join(base_dir, path)):
            per_model[transcript.model] = per_model.get(transcript.model, 0) + 1
    expected = study.declared.get('records_per_model', study.outputs_per_model)
    for model in study.models:
        checks.append(Check(study.name, 'records:' + model, expected, per_model.get(model, 0)))
    checks.append(Check(study.name, 'records:total', study.declared.get('records_total', study.outputs_total),
                        sum(per_model.values())))


def experiment_arithmetic_check(studies, base_dir=None):
    """
    Check every study's declared totals against its factors, and its files against the totals.
    :param studies: Iterable[Study]; Studies from `load_manifest`.
    :param base_dir: Optional[str]; Directory the study files are relative to. Files are not read when None.
    :return: ManifestReport
    """
    checks = []
    for study in studies:
        if study.kind == TRANSCRIPTS:
            _declared(checks, study, 'records_per_model', study.outputs_per_model)
            _declared(checks, study, 'records_total', study.outputs_total)
        else:
            _declared(checks, study, 'outputs_per_model', study.outputs_per_model)
            _declared(checks, study, 'outputs_total', study.outputs_total)
            _declared(checks, study, 'judge_rows_total', study.judge_rows_total)
            if study.judging == COMPLETE:
                _declared(checks, study, 'rows_per_judge_file', study.outputs_total)
        if base_dir is not None and study.files:
            if study.kind == TRANSCRIPTS:
                _transcript_file_checks(checks, study, base_dir)
            else:
                _judge_file_checks(checks, study, base_dir)
    report = ManifestReport(tuple(checks))
    for check in report.mismatches:
        logger.warning('Study %s: %s expected %d, found %d', check.study, check.name, check.expected, check.actual)
    return report
