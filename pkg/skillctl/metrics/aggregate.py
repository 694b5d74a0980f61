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

""" Aggregates over judge records: cross-judge output scores, condition means, paired deltas and rates.

Sums use `math.fsum`, so every aggregate is exact up to a single final rounding and does not depend on record
order. Rounding to three decimals happens only when results are serialized or printed.
"""

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from logzero import logger

from skillctl.compiler import Condition
from skillctl.config import Config
from skillctl.errors import JudgeRecordError
from skillctl.util import round_half_up

QUALITY = 'quality'


def mean(values):
    """
    :param values: Sequence[float]
    :return: Optional[float]; Arithmetic mean, None for no values.
    """
    values = list(values)
    if not values:
        return None
    return math.fsum(values) / len(values)


def _rounded(value):
    return None if value is None else round_half_up(value)


@dataclass(frozen=True)
class OutputScore:
    """
    Scores of one generated output after cross-judging.

    judges: Tuple[str, ...]; Judges whose rows went into the scores.
    """
    output_id: str
    gen_model: str
    skill_id: str
    task_id: str
    condition: str
    repeat: str
    scores: Dict[str, float]
    judges: Tuple[str, ...]

    def score(self, dimension):
        return self.scores.get(dimension)


@dataclass(frozen=True)
class CrossJudgeResult:
    """
    outputs: Tuple[OutputScore, ...]; One entry per output with at least one eligible judge, in first-seen order.
    coverage_gaps: Tuple[str, ...]; Output ids left with no eligible judge.
    self_judged: int; Rows dropped because the judge generated the output.
    """
    outputs: Tuple[OutputScore, ...]
    coverage_gaps: Tuple[str, ...] = ()
    self_judged: int = 0


def counterpart(model, pair):
    """
    :param model: str; Generation model.
    :param pair: Sequence[str]; The two models that judge each other.
    :return: Optional[str]; The other half of the pair, None if `model` is not in it.
    """
    if len(pair) == 2 and model in pair:
        return pair[1] if model == pair[0] else pair[0]
    return None


def cross_judge_aggregate(records, pair=None):
    """
    Turn deduplicated judge rows into one score set per output. Self-judged rows never count. Outputs generated by
    a model of the reciprocal pair take the other pair member's scores only; other outputs take the mean over their
    judges.
    :param records: Iterable[JudgeRecord]; Deduplicated records.
    :param pair: Optional[Sequence[str]]; Reciprocal judge pair, defaults to `Config()['reciprocal-pair']`.
    :return: CrossJudgeResult
    :raises JudgeRecordError: One output id with rows from different generators.
    """
    pair = tuple(Config()['reciprocal-pair'] if pair is None else pair)
    groups = OrderedDict()
    for record in records:
        groups.setdefault(record.output_id, []).append(record)

    outputs = []
    gaps = []
    self_judged = 0
    for (output_id, rows) in groups.items():
        generators = {r.gen_model for r in rows}
        if len(generators) > 1:
            raise JudgeRecordError('Output {} has rows from several generators: {}'.format(
                output_id, ', '.join(sorted(generators))))
        first = rows[0]
        eligible = [r for r in rows if not r.self_judged]
        self_judged += len(rows) - len(eligible)
        other = counterpart(first.gen_model, pair)
        if other is not None:
            eligible = [r for r in eligible if r.judge_model == other]
        if not eligible:
            gaps.append(output_id)
            continue
        dimensions = sorted({d for r in eligible for d in r.scores})
        scores = {d: mean(r.scores[d] for r in eligible if d in r.scores) for d in dimensions}
        outputs.append(OutputScore(output_id, first.gen_model, first.skill_id, first.task_id, first.condition,
                                   first.repeat, scores, tuple(sorted({r.judge_model for r in eligible}))))

    if gaps:
        logger.warning('%d output(s) have no eligible judge: %s', len(gaps), ', '.join(gaps[:5]))
    if self_judged:
        logger.info('Excluded %d self-judged row(s)', self_judged)
    return CrossJudgeResult(tuple(outputs), tuple(gaps), self_judged)


@dataclass(frozen=True)
class ConditionMeans:
    """
    Per-model means by condition. Means are unrounded; deltas are taken before rounding.
    """
    model: str
    means: Dict[str, float]
    counts: Dict[str, int]

    def mean(self, condition):
        return self.means.get(condition)

    def delta(self, treatment, baseline):
        """
        :return: Optional[float]; mean(treatment) - mean(baseline), None if either is missing.
        """
        if treatment not in self.means or baseline not in self.means:
            return None
        return self.means[treatment] - self.means[baseline]

    @property
    def contractual_minus_no_skill(self):
        return self.delta(Condition.CONTRACTUAL.value, Condition.NO_SKILL.value)

    @property
    def contractual_minus_plain(self):
        return self.delta(Condition.CONTRACTUAL.value, Condition.PLAIN_EXPANDED.value)

    def serialize(self):
        return {
            'model': self.model,
            'n': dict(self.counts),
            'means': {c: _rounded(m) for (c, m) in self.means.items()},
            'c_minus_no': _rounded(self.contractual_minus_no_skill),
            'c_minus_plain': _rounded(self.contractual_minus_plain),
        }


def condition_means(outputs, dimension=QUALITY):
    """
    :param outputs: Iterable[OutputScore]; Cross-judged outputs.
    :param dimension: str; Score dimension.
    :return: List[ConditionMeans]; One row per generation model, in first-seen order.
    """
    values = OrderedDict()
    for output in outputs:
        score = output.score(dimension)
        if score is None:
            continue
        values.setdefault(output.gen_model, OrderedDict()).setdefault(output.condition, []).append(score)
    return [ConditionMeans(model, {c: mean(v) for (c, v) in by_cond.items()},
                           {c: len(v) for (c, v) in by_cond.items()})
            for (model, by_cond) in values.items()]


@dataclass(frozen=True)
class PairedStats:
    """
    n: int; Complete pairs.
    mean_delta: Optional[float]; Mean of treatment - baseline over the pairs.
    unpaired_baseline / unpaired_treatment: Tuple[Tuple[str, ...], ...]; Pair keys present on one side only.
    """
    n: int
    wins: int
    ties: int
    losses: int
    mean_delta: Optional[float]
    unpaired_baseline: Tuple[tuple, ...] = ()
    unpaired_treatment: Tuple[tuple, ...] = ()
    duplicate_keys: int = 0

    def __post_init__(self):
        if self.wins + self.ties + self.losses != self.n:
            raise ValueError('wins + ties + losses must equal the number of pairs')

    def serialize(self):
        return {
            'n': self.n,
            'wins': self.wins,
            'ties': self.ties,
            'losses': self.losses,
            'mean_delta': _rounded(self.mean_delta),
            'unpaired_baseline': len(self.unpaired_baseline),
            'unpaired_treatment': len(self.unpaired_treatment),
            'duplicate_keys': self.duplicate_keys,
        }


def _index(records, dimension):
    index = {}
    duplicates = 0
    for record in records:
        if record.score(dimension) is None:
            continue
        key = record.pair_key()
        duplicates += key in index
        index[key] = record
    return index, duplicates


def paired_deltas(baseline, treatment, dimension=QUALITY, epsilon=None):
    """
    Pair rows on (skill, task, generator, repeat, judge) and compare treatment with baseline.
    :param baseline: Iterable[JudgeRecord]; E.g. original-skill rows.
    :param treatment: Iterable[JudgeRecord]; E.g. contractual-rewrite rows.
    :param dimension: str; Score dimension.
    :param epsilon: Optional[float]; |delta| below this is a tie, defaults to `Config()['tie-epsilon']`.
    :return: PairedStats; Unpaired keys are reported, not dropped silently.
    """
    epsilon = Config()['tie-epsilon'] if epsilon is None else epsilon
    base, base_dups = _index(baseline, dimension)
    treat, treat_dups = _index(treatment, dimension)
    if base_dups or treat_dups:
        logger.warning('%d duplicate pair key(s); the last row per key is used', base_dups + treat_dups)

    deltas = [treat[k].score(dimension) - base[k].score(dimension) for k in sorted(set(base) & set(treat))]
    wins = sum(1 for d in deltas if d >= epsilon)
    losses = sum(1 for d in deltas if d <= -epsilon)
    unpaired_base = tuple(sorted(set(base) - set(treat)))
    unpaired_treat = tuple(sorted(set(treat) - set(base)))
    if unpaired_base or unpaired_treat:
        logger.warning('Unpaired rows: %d baseline, %d treatment', len(unpaired_base), len(unpaired_treat))
    return PairedStats(len(deltas), wins, len(deltas) - wins - losses, losses, mean(deltas),
                       unpaired_base, unpaired_treat, base_dups + treat_dups)


def per_model_deltas(baseline, treatment, dimension=QUALITY, epsilon=None):
    """
    :return: OrderedDict[str, PairedStats]; Paired stats per generation model, models sorted by name.
    """
    baseline = list(baseline)
    treatment = list(treatment)
    models = sorted({r.gen_model for r in baseline} | {r.gen_model for r in treatment})
    return OrderedDict(
        (model, paired_deltas([r for r in baseline if r.gen_model == model],
                              [r for r in treatment if r.gen_model == model], dimension, epsilon))
        for model in models
    )


@dataclass(frozen=True)
class VariantStats:
    """
    One row of the variant comparison: row count, dimension means and flag rates.
    """
    variant: str
    n: int
    means: Dict[str, float] = field(default_factory=dict)
    critical_rate: float = 0.0
    over_execution_rate: float = 0.0

    def serialize(self):
        return {
            'variant': self.variant,
            'n': self.n,
            'means': {d: _rounded(m) for (d, m) in self.means.items()},
            'critical_error_rate': _rounded(self.critical_rate),
            'over_execution_rate': _rounded(self.over_execution_rate),
        }


def _group(records, key):
    groups = OrderedDict()
    for record in records:
        groups.setdefault(key(record), []).append(record)
    return groups


def error_rates(records):
    """
    Critical-error and over-execution rates per variant.
    :param records: Iterable[JudgeRecord]
    :return: OrderedDict[str, Dict[str, float]]; variant -> {'n', 'critical_error', 'over_execution'}.
    """
    rates = OrderedDict()
    for (variant, rows) in _group(records, lambda r: r.condition).items():
        rates[variant] = {
            'n': len(rows),
            'critical_error': sum(1 for r in rows if r.critical_error) / len(rows),
            'over_execution': sum(1 for r in rows if r.over_execution) / len(rows),
        }
    return rates


def variant_stats(records, dimensions=None):
    """
    :param records: Iterable[JudgeRecord]; Deduplicated rows of every variant.
    :param dimensions: Optional[Sequence[str]]; Defaults to `Config()['dimensions']`.
    :return: List[VariantStats]; In first-seen variant order.
    """
    dimensions = dimensions or Config()['dimensions']
    records = list(records)
    rates = error_rates(records)
    stats = []
    for (variant, rows) in _group(records, lambda r: r.condition).items():
        means = OrderedDict()
        for dimension in dimensions:
            value = mean(r.score(dimension) for r in rows if r.score(dimension) is not None)
            if value is not None:
                means[dimension] = value
        stats.append(VariantStats(variant, len(rows), means, rates[variant]['critical_error'],
                                  rates[variant]['over_execution']))
    return stats
