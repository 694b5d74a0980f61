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

""" Challenge transcripts and their JSON Lines file format.
"""

import json
from dataclasses import dataclass
from typing import Tuple

from logzero import logger

from skillctl.compiler import Condition
from skillctl.errors import TranscriptError
from skillctl.tools.registry import ToolCallRecord, simulate_call
from skillctl.util import parse_bool


@dataclass(frozen=True)
class Transcript:
    """
    run_id: str; Unique within a file.
    model: str; Generation model.
    condition: Condition; Instruction condition the model ran under.
    task_id: str; Challenge task.
    challenge_mode: bool; Risk labels were hidden from the tool list.
    calls: Tuple[ToolCallRecord, ...]; Tool calls with strictly increasing seq.
    final_message: str; The model's last message to the user.
    """
    run_id: str
    model: str
    condition: Condition
    task_id: str
    challenge_mode: bool = True
    calls: Tuple[ToolCallRecord, ...] = ()
    final_message: str = ''

    def __post_init__(self):
        seqs = [c.seq for c in self.calls]
        if any(b <= a for (a, b) in zip(seqs, seqs[1:])):
            raise TranscriptError('Run {}: call seq must be strictly increasing, got {}'.format(self.run_id, seqs))

    def serialize(self):
        return {
            'run_id': self.run_id,
            'model': self.model,
            'condition': self.condition.value,
            'task_id': self.task_id,
            'challenge_mode': self.challenge_mode,
            'calls': [c.serialize() for c in self.calls],
            'final_message': self.final_message,
        }

    @staticmethod
    def from_dict(obj):
        """
        :raises TranscriptError: Not a JSON object, missing fields, an unknown condition or a `challenge_mode` that is
        not a boolean.
        """
        if not isinstance(obj, dict):
            raise TranscriptError('Transcript must be a JSON object, got {}'.format(type(obj).__name__))
        missing = [k for k in ('run_id', 'model', 'condition', 'task_id') if k not in obj]
        if missing:
            raise TranscriptError('Transcript is missing {}'.format(', '.join(missing)))
        condition = Condition.parse(obj['condition'])
        if condition is None:
            raise TranscriptError('Unknown condition {!r}'.format(obj['condition']))
        try:
            calls = tuple(ToolCallRecord.from_dict(c) for c in obj.get('calls') or [])
        except (KeyError, ValueError, TypeError) as err:
            raise TranscriptError('Run {}: malformed call record: {}'.format(obj['run_id'], err))
        challenge_mode = parse_bool(obj.get('challenge_mode', True))
        if challenge_mode is None:
            raise TranscriptError('Run {}: challenge_mode must be true or false, got {!r}'.format(
                obj['run_id'], obj['challenge_mode']))
        return Transcript(str(obj['run_id']), str(obj['model']), condition, str(obj['task_id']),
                          challenge_mode, calls, str(obj.get('final_message') or ''))


def record_run(registry, run_id, model, condition, task_id, requests, final_message, challenge_mode=True):
    """
    Build a transcript by replaying tool requests through the simulated adapter.
    :param registry: Registry; Simulated tools.
    :param requests: Iterable[Tuple[str, Dict[str, any]]]; (tool, args) in call order.
    :return: Transcript
    """
    calls = tuple(simulate_call(registry, tool, args, seq) for (seq, (tool, args)) in enumerate(requests))
    return Transcript(run_id, model, condition, task_id, challenge_mode, calls, final_message)


def read_transcripts(path):
    """
    Read a JSON Lines transcript file. Blank lines are skipped.
    :param path: str; File to read.
    :return: List[Transcript]; In file order.
    :raises TranscriptError: With the offending line number.
    """
    transcripts = []
    seen = set()
    with open(path, encoding='utf-8') as file:
        for (number, line) in enumerate(file, start=1):
            if not line.strip():
                continue
            try:
                transcript = Transcript.from_dict(json.loads(line))
            except json.JSONDecodeError as err:
                raise TranscriptError('{}: invalid JSON: {}'.format(path, err.msg), number)
            except TranscriptError as err:
                raise TranscriptError('{}: {}'.format(path, err.message), number)
            if transcript.run_id in seen:
                raise TranscriptError('{}: duplicate run_id {}'.format(path, transcript.run_id), number)
            seen.add(transcript.run_id)
            transcripts.append(transcript)
    logger.debug('Read %d transcript(s) from %s', len(transcripts), path)
    return transcripts


def write_transcripts(path, transcripts):
    """
    :param path: str; Destination.
    :param transcripts: Iterable[Transcript]
    """
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        for transcript in transcripts:
            file.write(json.dumps(transcript.serialize(), sort_keys=True, ensure_ascii=False) + '\n')
