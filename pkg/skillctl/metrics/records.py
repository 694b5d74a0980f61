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

""" Judge-record CSV files and deduplication.
"""

import csv
from dataclasses import dataclass, field
from typing import Dict

from logzero import logger

from skillctl.compiler import Condition
from skillctl.config import Config
from skillctl.errors import JudgeRecordError
from skillctl.metrics import SCORE_MAX, SCORE_MIN
from skillctl.util import parse_bool

REQUIRED_COLUMNS = ('run_id', 'output_id', 'gen_model', 'judge_model', 'skill_id', 'task_id', 'condition')
CSV_COLUMNS = REQUIRED_COLUMNS + ('repeat', 'quality', 'utility', 'governance', 'reliability', 'critical_error',
                                  'over_execution', 'timestamp')
# Text-study files carry a single `score` column; it is read as quality.
SCORE_ALIASES = {'score': 'quality'}


def canonical_condition(value):
    """
    :param value: str; Condition or variant label from a judge file.
    :return: str; Condition value ('no-skill', ...) when the label names one, else the stripped label.
    """
    cond = Condition.parse(value)
    return cond.value if cond is not None else value.strip()


@dataclass(frozen=True)
class JudgeRecord:
    """
    One judge's scores for one generated output.

    condition: str; Instruction condition (text study) or skill variant (market study).
    repeat: str; Repeat number, part of the pairing key.
    scores: Dict[str, float]; dimension -> score in [1, 5]. Dimensions left blank in the file are absent.
    """
    run_id: str
    output_id: str
    gen_model: str
    judge_model: str
    skill_id: str
    task_id: str
    condition: str
    scores: Dict[str, float] = field(default_factory=dict)
    critical_error: bool = False
    over_execution: bool = False
    timestamp: str = ''
    repeat: str = '1'

    def __post_init__(self):
        for (dimension, value) in self.scores.items():
            if not SCORE_MIN <= value <= SCORE_MAX:
                raise JudgeRecordError('Run {}: {} score {} is outside [{:g}, {:g}]'.format(
                    self.run_id, dimension, value, SCORE_MIN, SCORE_MAX))

    @property
    def self_judged(self):
        return self.gen_model == self.judge_model

    def score(self, dimension):
        return self.scores.get(dimension)

    def pair_key(self):
        """(skill, task, generator, repeat, judge): the key original and contractual rows are paired on."""
        return self.skill_id, self.task_id, self.gen_model, self.repeat, self.judge_model

    def to_row(self, dimensions=None):
        dimensions = dimensions or Config()['dimensions']
        row = {k: getattr(self, k) for k in REQUIRED_COLUMNS + ('repeat', 'timestamp')}
        for dimension in dimensions:
            row[dimension] = '' if dimension not in self.scores else repr(self.scores[dimension])
        row['critical_error'] = 'true' if self.critical_error else 'false'
        row['over_execution'] = 'true' if self.over_execution else 'false'
        return row


def _flag(row, column, line):
    value = parse_bool(row.get(column))
    if value is None:
        raise JudgeRecordError('{} must be a boolean, got {!r}'.format(column, row.get(column)), line)
    return value


def record_from_row(row, line=None, dimensions=None):
    """
    :param row: Dict[str, str]; CSV row.
    :param line: Optional[int]; Line number for errors.
    :param dimensions: Optional[Sequence[str]]; Score columns, defaults to `Config()['dimensions']`.
    :return: JudgeRecord
    :raises JudgeRecordError: Missing values, unparsable scores or flags.
    """
    dimensions = dimensions or Config()['dimensions']
    missing = [c for c in REQUIRED_COLUMNS if not (row.get(c) or '').strip()]
    if missing:
        raise JudgeRecordError('Missing value(s) for {}'.format(', '.join(missing)), line)
    scores = {}
    for column in list(dimensions) + list(SCORE_ALIASES):
        raw = (row.get(column) or '').strip()
        if not raw:
            continue
        dimension = SCORE_ALIASES.get(column, column)
        try:
            scores[dimension] = float(raw)
        except ValueError:
            raise JudgeRecordError('{} is not a number: {!r}'.format(column, raw), line)
    try:
        return JudgeRecord(
            run_id=row['run_id'].strip(),
            output_id=row['output_id'].strip(),
            gen_model=row['gen_model'].strip(),
            judge_model=row['judge_model'].strip(),
            skill_id=row['skill_id'].strip(),
            task_id=row['task_id'].strip(),
            condition=canonical_condition(row['condition']),
            scores=scores,
            critical_error=_flag(row, 'critical_error', line),
            over_execution=_flag(row, 'over_execution', line),
            timestamp=(row.get('timestamp') or '').strip(),
            repeat=(row.get('repeat') or '').strip() or '1',
        )
    except JudgeRecordError as err:
        raise JudgeRecordError(err.message, line)


def read_judge_records(path, dimensions=None):
    """
    Read a judge-record CSV file (UTF-8, header row, RFC 4180 quoting).
    :param path: str; File to read.
    :param dimensions: Optional[Sequence[str]]; Score columns.
    :return: List[JudgeRecord]; In file order, duplicates included.
    :raises JudgeRecordError: Bad header or row, with the line number.
    """
    records = []
    with open(path, encoding='utf-8', newline='') as file:
        reader = csv.DictReader(file)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise JudgeRecordError('{}: header is missing {}'.format(path, ', '.join(missing)), 1)
        for row in reader:
            try:
                records.append(record_from_row(row, reader.line_num, dimensions))
            except JudgeRecordError as err:
                raise JudgeRecordError('{}: {}'.format(path, err.message), err.line)
    logger.debug('Read %d judge record(s) from %s', len(records), path)
    return records


def write_judge_records(path, records, dimensions=None):
    """
    :param path: str; Destination.
    :param records: Iterable[JudgeRecord]
    :param dimensions: Optional[Sequence[str]]; Score columns.
    """
    dimensions = list(dimensions or Config()['dimensions'])
    columns = list(REQUIRED_COLUMNS) + ['repeat'] + dimensions + ['critical_error', 'over_execution', 'timestamp']
    with open(path, 'w', encoding='utf-8', newline='') as file:
        writer = csv.DictWriter(file, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for record in records:
            writer.writerow(record.to_row(dimensions))


def dedup_records(records):
    """
    Keep the last record per (run_id, judge_model). Retried judge calls leave earlier rows behind in raw files.
    :param records: Sequence[JudgeRecord]; In file order.
    :return: List[JudgeRecord], int; Kept records in file order of the kept rows, and the number dropped.
    """
    last = {}
    for (index, record) in enumerate(records):
        last[(record.run_id, record.judge_model)] = index
    keep = sorted(last.values())
    dropped = len(records) - len(keep)
    if dropped:
        logger.info('Dropped %d duplicate judge row(s)', dropped)
    return [records[i] for i in keep], dropped
