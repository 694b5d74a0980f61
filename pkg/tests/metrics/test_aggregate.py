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

import random

import pytest

from skillctl.compiler import Condition
from skillctl.errors import JudgeRecordError
from skillctl.metrics.aggregate import *
from skillctl.metrics.records import JudgeRecord, dedup_records, read_judge_records
from skillctl.util import round_half_up
from tests import fixture_path

PAIR = ('gpt-5.5', 'claude-opus-4-7')

# model -> (no-skill, minimal, plain-expanded, contractual, C - No, C - Plain)
TEXT_TABLE = {
    'gpt-5.5': (4.617, 4.767, 4.922, 4.989, 0.372, 0.067),
    'DeepSeek-V4-Pro': (4.500, 4.703, 4.864, 4.939, 0.439, 0.075),
    'qwen3.6-plus': (4.644, 4.828, 4.883, 4.964, 0.319, 0.081),
    'GLM-5.1': (4.636, 4.733, 4.936, 4.928, 0.292, -0.008),
    'MiniMax-M2.7': (4.561, 4.694, 4.864, 4.856, 0.294, -0.008),
    'Kimi-K2.6': (4.692, 4.833, 4.889, 4.925, 0.233, 0.036),
    'gemini-3.1-pro-preview': (4.714, 4.875, 4.906, 4.953, 0.239, 0.047),
    'claude-opus-4-7': (4.867, 4.928, 4.972, 4.983, 0.117, 0.011),
}

# variant -> (n, quality, utility, governance, reliability, critical error rate, over-execution rate)
MARKET_TABLE = {
    'original': (1152, 4.692, 4.700, 4.736, 4.642, 0.083, 0.022),
    'contractual': (1152, 4.914, 4.924, 4.924, 4.896, 0.013, 0.003),
}


def _load(*names):
    records = []
    for name in names:
        records.extend(read_judge_records(fixture_path('judges', name)))
    return dedup_records(records)[0]


@pytest.fixture(scope='module')
def text_records():
    return _load('text-gpt-5.5.csv', 'text-claude-opus-4-7.csv')


@pytest.fixture(scope='module')
def market_records():
    return _load('market-gpt-5.5.csv', 'market-gemini-3.1-pro-preview.csv')


def _record(output_id, gen, judge, condition='contractual', score=4.0, skill='s', task='t', repeat='1', **kwargs):
    return JudgeRecord('{}@{}'.format(output_id, judge), output_id, gen, judge, skill, task, condition,
                       {'quality': score}, repeat=repeat, **kwargs)


def test_text_study_table(text_records):
    result = cross_judge_aggregate(text_records, PAIR)
    assert len(result.outputs) == 960
    assert result.coverage_gaps == ()
    assert result.self_judged == 0
    rows = {row.model: row for row in condition_means(result.outputs, QUALITY)}
    assert set(rows) == set(TEXT_TABLE)
    for (model, expected) in TEXT_TABLE.items():
        row = rows[model]
        actual = tuple(round_half_up(row.mean(c.value)) for c in Condition) + (
            round_half_up(row.contractual_minus_no_skill), round_half_up(row.contractual_minus_plain))
        assert actual == expected, model
        assert row.counts == {c.value: 30 for c in Condition}


def test_text_study_judges(text_records):
    outputs = {o.output_id: o for o in cross_judge_aggregate(text_records, PAIR).outputs}
    assert outputs['gpt-5.5/sales-growth/t1/no-skill/r1'].judges == ('claude-opus-4-7',)
    assert outputs['claude-opus-4-7/sales-growth/t1/no-skill/r1'].judges == ('gpt-5.5',)
    assert outputs['Kimi-K2.6/sales-growth/t1/no-skill/r1'].judges == PAIR[::-1]


def test_market_variant_table(market_records):
    stats = variant_stats(market_records)
    assert [s.variant for s in stats] == ['original', 'contractual']
    for row in stats:
        n, quality, utility, governance, reliability, critical, over = MARKET_TABLE[row.variant]
        assert row.n == n
        assert {d: round_half_up(m) for (d, m) in row.means.items()} == {
            'quality': quality, 'utility': utility, 'governance': governance, 'reliability': reliability}
        assert round_half_up(row.critical_rate) == critical
        assert round_half_up(row.over_execution_rate) == over


def test_market_paired_deltas(market_records):
    base = [r for r in market_records if r.condition == 'original']
    treat = [r for r in market_records if r.condition == 'contractual']
    stats = paired_deltas(base, treat, QUALITY)
    assert (stats.n, stats.wins, stats.ties, stats.losses) == (1152, 496, 585, 71)
    assert round_half_up(stats.mean_delta) == 0.221
    assert stats.unpaired_baseline == stats.unpaired_treatment == ()
    assert stats.serialize()['mean_delta'] == 0.221


def test_market_per_model(market_records):
    base = [r for r in market_records if r.condition == 'original']
    treat = [r for r in market_records if r.condition == 'contractual']
    per_model = per_model_deltas(base, treat)
    assert list(per_model) == sorted(per_model)
    assert len(per_model) == 6
    assert sum(s.n for s in per_model.values()) == 1152
    assert all(s.mean_delta > 0 for s in per_model.values())
    smallest = sorted(per_model, key=lambda m: per_model[m].mean_delta)[:2]
    assert set(smallest) == set(PAIR)


def test_error_rates(market_records):
    rates = error_rates(market_records)
    assert rates['original']['n'] == 1152
    assert round_half_up(rates['contractual']['critical_error']) == 0.013


def test_mean():
    assert mean([]) is None
    assert mean([0.1] * 10) == 0.1
    assert mean([1e16, 1.0, -1e16]) == pytest.approx(1 / 3)


def test_self_judged_rows_are_dropped():
    records = [_record('o1', 'm', 'm', score=5.0), _record('o1', 'm', 'j', score=3.0)]
    result = cross_judge_aggregate(records, PAIR)
    assert result.self_judged == 1
    assert result.outputs[0].score('quality') == 3.0


def test_pair_outputs_use_counterpart_only():
    records = [_record('o1', 'gpt-5.5', 'claude-opus-4-7', score=4.0), _record('o1', 'gpt-5.5', 'other', score=2.0)]
    [output] = cross_judge_aggregate(records, PAIR).outputs
    assert output.score('quality') == 4.0
    assert output.judges == ('claude-opus-4-7',)


def test_coverage_gap():
    records = [_record('o1', 'gpt-5.5', 'gpt-5.5'), _record('o2', 'x', 'y')]
    result = cross_judge_aggregate(records, PAIR)
    assert result.coverage_gaps == ('o1',)
    assert [o.output_id for o in result.outputs] == ['o2']


def test_generator_mismatch():
    with pytest.raises(JudgeRecordError):
        cross_judge_aggregate([_record('o1', 'a', 'j'), _record('o1', 'b', 'j')], PAIR)


def test_counterpart():
    assert counterpart('gpt-5.5', PAIR) == 'claude-opus-4-7'
    assert counterpart('claude-opus-4-7', PAIR) == 'gpt-5.5'
    assert counterpart('other', PAIR) is None
    assert counterpart('gpt-5.5', ()) is None


def test_paired_ties_and_unpaired():
    base = [_record('o1', 'm', 'j', 'original', 4.0, task='t1'), _record('o2', 'm', 'j', 'original', 4.0, task='t2'),
            _record('o3', 'm', 'j', 'original', 5.0, task='t3'), _record('o4', 'm', 'j', 'original', 5.0, task='t4')]
    treat = [_record('p1', 'm', 'j', 'contractual', 4.0 + 1e-12, task='t1'),
             _record('p2', 'm', 'j', 'contractual', 4.5, task='t2'),
             _record('p3', 'm', 'j', 'contractual', 4.5, task='t3'),
             _record('p5', 'm', 'j', 'contractual', 4.5, task='t5')]
    stats = paired_deltas(base, treat)
    assert (stats.n, stats.wins, stats.ties, stats.losses) == (3, 1, 1, 1)
    assert stats.mean_delta == pytest.approx(0.0, abs=1e-9)
    assert stats.unpaired_baseline == (('s', 't4', 'm', '1', 'j'),)
    assert stats.unpaired_treatment == (('s', 't5', 'm', '1', 'j'),)
    assert paired_deltas(base, treat, epsilon=1e-15).ties == 0


def test_paired_duplicates():
    base = [_record('o1', 'm', 'j', 'original', 3.0), _record('o1b', 'm', 'j', 'original', 4.0)]
    treat = [_record('p1', 'm', 'j', 'contractual', 4.0)]
    stats = paired_deltas(base, treat)
    assert stats.duplicate_keys == 1
    assert stats.ties == 1


def test_paired_stats_invariant():
    with pytest.raises(ValueError):
        PairedStats(3, 1, 1, 0, 0.0)


def test_condition_means_skips_missing_scores():
    records = [_record('o1', 'm', 'j', 'no-skill', 4.0), _record('o2', 'm', 'j', 'contractual', 5.0)]
    outputs = cross_judge_aggregate(records, PAIR).outputs
    [row] = condition_means(outputs, QUALITY)
    assert row.contractual_minus_no_skill == 1.0
    assert row.contractual_minus_plain is None
    assert row.serialize()['c_minus_plain'] is None
    assert condition_means(outputs, 'utility') == []


def _brute_force(records, pair):
    scores = {}
    for record in records:
        if record.gen_model == record.judge_model:
            continue
        if record.gen_model in pair and record.judge_model != [p for p in pair if p != record.gen_model][0]:
            continue
        scores.setdefault(record.output_id, []).append(record.score('quality'))
    by_model = {}
    for record in records:
        if record.output_id in scores:
            values = scores[record.output_id]
            key = (record.gen_model, record.condition)
            by_model.setdefault(key, {})[record.output_id] = sum(values) / len(values)
    return {key: sum(v.values()) / len(v) for (key, v) in by_model.items()}


def test_aggregate_matches_brute_force():
    rng = random.Random(99)
    models = ['gpt-5.5', 'claude-opus-4-7', 'm1', 'm2']
    judges = ['gpt-5.5', 'claude-opus-4-7', 'j3']
    conditions = [c.value for c in Condition]
    for trial in range(50):
        records = []
        for n in range(rng.randint(1, 40)):
            gen = rng.choice(models)
            output_id = 'o{}'.format(n)
            for judge in rng.sample(judges, rng.randint(1, 3)):
                records.append(_record(output_id, gen, judge, conditions[n % 4], rng.choice([1.0, 2.5, 3.0, 4.5, 5.0])))
        rng.shuffle(records)
        expected = _brute_force(records, PAIR)
        actual = {(row.model, c): m for row in condition_means(cross_judge_aggregate(records, PAIR).outputs)
                  for (c, m) in row.means.items()}
        assert set(actual) == set(expected)
        for key in expected:
            assert actual[key] == pytest.approx(expected[key])


def test_paired_matches_brute_force():
    rng = random.Random(7)
    for trial in range(50):
        base = []
        treat = []
        for n in range(rng.randint(0, 30)):
            task = 't{}'.format(n)
            if rng.random() < 0.9:
                base.append(_record('b' + task, 'm', 'j', 'original', rng.choice([3.0, 4.0, 4.5, 5.0]), task=task))
            if rng.random() < 0.9:
                treat.append(_record('c' + task, 'm', 'j', 'contractual', rng.choice([3.0, 4.0, 4.5, 5.0]),
                                     task=task))
        stats = paired_deltas(base, treat)
        deltas = [t.score('quality') - b.score('quality') for b in base for t in treat if b.task_id == t.task_id]
        assert stats.n == len(deltas)
        assert stats.wins == sum(1 for d in deltas if d > 0)
        assert stats.losses == sum(1 for d in deltas if d < 0)
        assert stats.ties == sum(1 for d in deltas if d == 0)
        if deltas:
            assert stats.mean_delta == pytest.approx(sum(deltas) / len(deltas))
        assert len(stats.unpaired_baseline) + stats.n == len(base)
        assert len(stats.unpaired_treatment) + stats.n == len(treat)
