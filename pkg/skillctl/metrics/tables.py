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

""" Aligned plain-text tables for condition, variant and paired results, and the plot-data export.
"""

from skillctl.compiler import Condition
from skillctl.util import format_fixed, round_half_up

CONDITION_COLUMNS = (
    (Condition.NO_SKILL.value, 'No skill'),
    (Condition.MINIMAL.value, 'Minimal'),
    (Condition.PLAIN_EXPANDED.value, 'Plain'),
    (Condition.CONTRACTUAL.value, 'Contractual'),
)
DIMENSION_TITLES = {'quality': 'Quality', 'utility': 'Utility', 'governance': 'Governance',
                    'reliability': 'Reliability'}


def render_grid(header, rows):
    """
    Render rows as an aligned grid: first column left-aligned, the rest right-aligned, a rule under the header.
    :param header: Sequence[str]
    :param rows: Sequence[Sequence[str]]
    :return: str; Grid text ending with a newline.
    """
    table = [list(header)] + [list(r) for r in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = []
    for (n, row) in enumerate(table):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for (c, w) in zip(row[1:], widths[1:])]
        lines.append('  '.join(cells).rstrip())
        if n == 0:
            lines.append('  '.join('-' * w for w in widths))
    return '\n'.join(lines) + '\n'


def condition_table(rows):
    """
    Model means per instruction condition with contractual-minus-baseline deltas.
    :param rows: Iterable[ConditionMeans]
    :return: str
    """
    header = ['Model'] + [title for (_, title) in CONDITION_COLUMNS] + ['C - No', 'C - Plain']
    body = []
    for row in rows:
        body.append([row.model]
                    + [format_fixed(row.mean(cond)) for (cond, _) in CONDITION_COLUMNS]
                    + [format_fixed(row.contractual_minus_no_skill), format_fixed(row.contractual_minus_plain)])
    return render_grid(header, body)


def variant_table(stats):
    """
    Row count, dimension means and flag rates per skill variant.
    :param stats: Iterable[VariantStats]
    :return: str
    """
    stats = list(stats)
    dimensions = []
    for row in stats:
        dimensions.extend(d for d in row.means if d not in dimensions)
    header = ['Variant', 'N'] + [DIMENSION_TITLES.get(d, d.title()) for d in dimensions] + ['Crit. err.',
                                                                                           'Over-exec.']
    body = [[row.variant.title(), str(row.n)] + [format_fixed(row.means.get(d)) for d in dimensions]
            + [format_fixed(row.critical_rate), format_fixed(row.over_execution_rate)] for row in stats]
    return render_grid(header, body)


def paired_summary(stats, baseline='original', treatment='contractual'):
    """
    :param stats: PairedStats
    :return: str; One-paragraph summary of the paired comparison.
    """
    delta = '-' if stats.mean_delta is None else '{:+.3f}'.format(round_half_up(stats.mean_delta))
    lines = [
        'Paired comparisons ({} vs {}): {}'.format(treatment, baseline, stats.n),
        'Mean paired delta: {}'.format(delta),
        'Wins {} / ties {} / losses {}'.format(stats.wins, stats.ties, stats.losses),
    ]
    if stats.unpaired_baseline or stats.unpaired_treatment:
        lines.append('Unpaired rows: {} {}, {} {}'.format(len(stats.unpaired_baseline), baseline,
                                                         len(stats.unpaired_treatment), treatment))
    return '\n'.join(lines) + '\n'


def plot_data(condition_rows=(), variants=(), matrix=None):
    """
    Series for external plotting tools. Values are rounded the same way as the tables.
    :param condition_rows: Iterable[ConditionMeans]
    :param variants: Iterable[VariantStats]
    :param matrix: Optional[AuditMatrix]
    :return: Dict[str, any]; JSON-serializable.
    """
    data = {}
    condition_rows = list(condition_rows)
    if condition_rows:
        data['condition_scores'] = {
            'conditions': [c for (c, _) in CONDITION_COLUMNS],
            'series': [{'model': r.model,
                        'values': [None if r.mean(c) is None else round_half_up(r.mean(c))
                                   for (c, _) in CONDITION_COLUMNS]}
                       for r in condition_rows],
        }
    variants = list(variants)
    if variants:
        data['variants'] = [v.serialize() for v in variants]
    if matrix is not None:
        data['high_risk_attempts'] = matrix.serialize()
    return data
