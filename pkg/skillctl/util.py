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

""" Utilities to help reduce code duplication.
"""

import hashlib
import json
import re
from decimal import Decimal, ROUND_HALF_UP

_WHITESPACE = re.compile(r'\s+')


def normalize_heading(raw):
    """
    Normalize a heading or title for lookup: trim, collapse internal whitespace and case-fold.
    :param raw: str; Heading text as written.
    :return: str; Normalized heading.
    """
    return _WHITESPACE.sub(' ', raw.strip()).casefold()


def canonical_json(obj):
    """
    Serialize an object to its canonical JSON form (sorted keys, no insignificant whitespace).
    :param obj: any; JSON-serializable object.
    :return: str; Canonical JSON text.
    """
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def sha256_hex(text):
    """
    Hash a string with SHA-256.
    :param text: str; Text to hash, encoded as UTF-8.
    :return: str; Hex digest.
    """
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def args_hash(args):
    """
    Stable short hash of a tool-call argument map. Used to key canned tool responses.
    :param args: Dict[str, any]; Arguments of the call.
    :return: str; First 16 hex characters of the SHA-256 of the canonical JSON form.
    """
    return sha256_hex(canonical_json(args))[:16]


def round_half_up(value, places=3):
    """
    Round half-up to a fixed number of decimal places. Python's `round` uses banker's rounding and works on the
    binary value, so 2.0005 would not reliably round up.
    :param value: float; Value to round.
    :param places: int; Number of decimal places.
    :return: float; Rounded value.
    """
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def format_fixed(value, places=3):
    """
    Format a number with half-up rounding and a fixed number of decimals, e.g. `4.617` or `-0.008`.
    :param value: Optional[float]; Value to format. None renders as '-'.
    :param places: int; Number of decimal places.
    :return: str; Formatted value.
    """
    if value is None:
        return '-'
    return '{:.{}f}'.format(round_half_up(value, places), places)


def word_count(text):
    """
    Count whitespace-delimited tokens.
    :param text: str; Text to count.
    :return: int; Number of tokens.
    """
    return len(text.split())


def parse_bool(value):
    """
    Use this to standardize parsing boolean strings from CSV and YAML files.
    :param value: Union[str, bool, int, None]; The value to parse.
    :return: Optional[bool]; True or False, or None if it could not parse the value.
    """
    if isinstance(value, bool):
        return value
    if value is None:
        return None
    value = str(value).strip().lower()
    if value in {'true', 't', 'yes', 'y', '1'}:
        return True
    if value in {'false', 'f', 'no', 'n', '0', ''}:
        return False
    return None


class Singleton(type):
    """
    Basic singleton type
    """
    _instances = {}

    def __call__(cls, *args, **kwargs):
        """
        Override the type 'call'. The first call constructs the instance; later calls return it.
        """
        if cls not in cls._instances:
            cls._instances[cls] = super().__call__(*args, **kwargs)
        return cls._instances[cls]
