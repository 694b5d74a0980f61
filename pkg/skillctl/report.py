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

""" Machine-readable report envelopes shared by the CLI and the Chaos Toolkit probes.
"""

import json

from skillctl import __version__

TOOL = 'skillctl'
# Caveats attached to reports whose numbers depend on them.
NOTES = {
    'checker': 'Default checker patterns are reconstructions written for skillctl; review the matches.',
    'plain-expanded': 'The plain-expanded condition is derived mechanically from the contract, not hand-written.',
}


def build_report(command, result, ruleset=None, notes=()):
    """
    Wrap a command result with the tool version and the rule set digest.
    :param command: str; Subcommand name.
    :param result: Dict[str, any]; Command payload.
    :param ruleset: Optional[RuleSet]; Rule set the command ran with.
    :param notes: Iterable[str]; Keys into `NOTES`.
    :return: Dict[str, any]
    """
    return {
        'tool': TOOL,
        'version': __version__,
        'command': command,
        'ruleset_sha256': ruleset.digest() if ruleset is not None else None,
        'notes': [NOTES[n] for n in notes],
        'result': result,
    }


def dump_json(report):
    """
    :return: str; Pretty JSON with sorted keys. Identical reports give identical bytes.
    """
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def emit(text, out=None):
    """
    Write report text to `out`, or stdout when no path is given.
    """
    if out:
        with open(out, 'w', encoding='utf-8', newline='\n') as file:
            file.write(text)
    else:
        print(text, end='')
