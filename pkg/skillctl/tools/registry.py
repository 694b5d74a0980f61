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

""" Simulated tool registry and the call adapter.
"""

import copy
import glob
import os
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Tuple

import yaml
from logzero import logger

from skillctl.config import Config
from skillctl.errors import RegistryError
from skillctl.tools import NOT_FOUND_BODY
from skillctl.util import args_hash

DEFAULT_REGISTRY_PATH = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data', 'tools.yml')
DEFAULT_CANNED_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data', 'canned')
PARAM_TYPES = ('string', 'int', 'bool')


class Risk(Enum):
    READ_ONLY = 'read_only'
    HIGH_RISK_WRITE = 'high_risk_write'


class Status(Enum):
    OK = 'ok'
    BLOCKED = 'blocked'
    ERROR = 'error'


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str = 'string'
    required: bool = True

    def __post_init__(self):
        if self.type not in PARAM_TYPES:
            raise RegistryError('Parameter {} has unknown type {!r}'.format(self.name, self.type))

    def accepts(self, value):
        if self.type == 'bool':
            return isinstance(value, bool)
        if self.type == 'int':
            return isinstance(value, int) and not isinstance(value, bool)
        return isinstance(value, str)


@dataclass(frozen=True)
class ToolSpec:
    """
    name: str; Tool name, unique within a registry.
    risk: Risk; Read-only tools answer from canned bodies; high-risk writes are always blocked.
    description: str; What the tool does, as shown to a model.
    params: Tuple[ParamSpec, ...]; Parameter schema.
    lexemes: Tuple[str, ...]; Words a completion claim for this tool would use, e.g. 'sent'.
    """
    name: str
    risk: Risk
    description: str = ''
    params: Tuple[ParamSpec, ...] = ()
    lexemes: Tuple[str, ...] = ()

    @property
    def high_risk(self):
        return self.risk is Risk.HIGH_RISK_WRITE

    def schema_errors(self, args):
        """
        :param args: Dict[str, any]; Call arguments.
        :return: List[str]; Violations of the parameter schema, empty when the call is well formed.
        """
        if not isinstance(args, dict):
            return ['arguments must be an object']
        errors = []
        known = {p.name: p for p in self.params}
        for param in self.params:
            if param.name not in args:
                if param.required:
                    errors.append('missing required parameter {}'.format(param.name))
            elif not param.accepts(args[param.name]):
                errors.append('parameter {} must be {}'.format(param.name, param.type))
        errors.extend('unknown parameter {}'.format(name) for name in sorted(set(args) - set(known)))
        return errors

    def export(self, challenge_mode=False):
        """
        :param challenge_mode: bool; Hide the risk label, as a general tool protocol would.
        :return: Dict[str, any]; Tool description for a prompt.
        """
        tool = {
            'name': self.name,
            'description': self.description,
            'parameters': [{'name': p.name, 'type': p.type, 'required': p.required} for p in self.params],
        }
        if not challenge_mode:
            tool['risk'] = self.risk.value
        return tool


@dataclass(frozen=True)
class ToolCallRecord:
    seq: int
    tool: str
    args: Dict[str, Any]
    result_status: Status
    result_body: str = ''

    def __post_init__(self):
        if self.seq < 0:
            raise ValueError('seq must be >= 0')

    def serialize(self):
        return {
            'seq': self.seq,
            'tool': self.tool,
            'args': copy.deepcopy(self.args),
            'result_status': self.result_status.value,
            'result_body': self.result_body,
        }

    @staticmethod
    def from_dict(obj):
        return ToolCallRecord(int(obj['seq']), str(obj['tool']), dict(obj.get('args') or {}),
                              Status(obj['result_status']), str(obj.get('result_body') or ''))


class Registry:
    """
    Immutable set of simulated tools plus canned read-tool bodies keyed by (tool, argument hash).
    """

    def __init__(self, tools, canned=None):
        """
        :param tools: Iterable[ToolSpec]; Tools, names must be unique.
        :param canned: Optional[Dict[str, Dict[str, str]]]; tool -> args_hash -> body.
        """
        self._tools = {}
        for tool in tools:
            if tool.name in self._tools:
                raise RegistryError('Duplicate tool {}'.format(tool.name))
            self._tools[tool.name] = tool
        self._canned = {tool: dict(bodies) for (tool, bodies) in (canned or {}).items()}

    def __contains__(self, name):
        return name in self._tools

    def __iter__(self):
        return iter(self._tools[name] for name in sorted(self._tools))

    def __len__(self):
        return len(self._tools)

    def get(self, name):
        return self._tools.get(name)

    def high_risk_tools(self):
        return [t for t in self if t.high_risk]

    def read_only_tools(self):
        return [t for t in self if not t.high_risk]

    def canned_body(self, tool, args):
        """
        :return: str; Canned body for these arguments, or `NOT_FOUND_BODY`.
        """
        return self._canned.get(tool, {}).get(args_hash(args), NOT_FOUND_BODY)

    def export_tools(self, challenge_mode=False):
        """
        :param challenge_mode: bool; Strip risk labels.
        :return: List[Dict[str, any]]; Tool list in name order.
        """
        return [t.export(challenge_mode) for t in self]


def simulate_call(registry, tool, args, seq=0):
    """
    Run one tool call against the simulated adapter. Nothing is ever written anywhere.
    :param registry: Registry; Available tools.
    :param tool: str; Tool name.
    :param args: Dict[str, any]; Call arguments.
    :param seq: int; Position of the call in its transcript.
    :return: ToolCallRecord; 'ok' with a canned body for read-only tools, 'blocked' for high-risk writes, 'error' for
    unknown tools and schema violations.
    """
    spec = registry.get(tool)
    args_copy = copy.deepcopy(args) if isinstance(args, dict) else {}
    if spec is None:
        logger.debug('Call %d: unknown tool %s', seq, tool)
        return ToolCallRecord(seq, tool, args_copy, Status.ERROR, 'unknown tool: {}'.format(tool))
    errors = spec.schema_errors(args)
    if errors:
        logger.debug('Call %d: %s rejected: %s', seq, tool, '; '.join(errors))
        return ToolCallRecord(seq, tool, args_copy, Status.ERROR, '; '.join(errors))
    if spec.high_risk:
        logger.debug('Call %d: %s blocked', seq, tool)
        return ToolCallRecord(seq, tool, args_copy, Status.BLOCKED,
                              'blocked: {} is a high-risk write and needs human approval'.format(tool))
    logger.debug('Call %d: %s ok', seq, tool)
    return ToolCallRecord(seq, tool, args_copy, Status.OK, registry.canned_body(tool, args))


def _tool_from_dict(obj):
    if not isinstance(obj, dict) or 'name' not in obj or 'risk' not in obj:
        raise RegistryError('Tool entries need a name and a risk: {!r}'.format(obj))
    try:
        risk = Risk(obj['risk'])
    except ValueError:
        raise RegistryError('Tool {} has unknown risk {!r}'.format(obj['name'], obj['risk']))
    params = tuple(ParamSpec(str(p['name']), str(p.get('type', 'string')), bool(p.get('required', True)))
                   for p in obj.get('params') or [])
    lexemes = tuple(str(x) for x in obj.get('lexemes') or [])
    if risk is Risk.HIGH_RISK_WRITE and not lexemes:
        logger.warning('High-risk tool %s has no action lexemes; completion claims cannot be detected', obj['name'])
    return ToolSpec(str(obj['name']), risk, str(obj.get('description') or ''), params, lexemes)


def _load_canned(directory):
    """
    Canned bodies live in `<directory>/<tool>.yml` as a mapping of argument hash -> {args, body}.
    """
    canned = {}
    for path in sorted(glob.glob(os.path.join(directory, '*.yml'))):
        tool = os.path.splitext(os.path.basename(path))[0]
        with open(path, encoding='utf-8') as file:
            entries = yaml.safe_load(file) or {}
        bodies = {}
        for (key, entry) in entries.items():
            expected = args_hash(entry.get('args') or {})
            if str(key) != expected:
                raise RegistryError('{}: key {} does not match the argument hash {}'.format(path, key, expected))
            bodies[expected] = str(entry.get('body') or '')
        canned[tool] = bodies
        logger.debug('Loaded %d canned response(s) for %s', len(bodies), tool)
    return canned


def load_registry(path=None, canned_dir=None):
    """
    Load a tool registry file.
    :param path: Optional[str]; Registry YAML, defaults to `Config()['registry']` and then the packaged registry.
    :param canned_dir: Optional[str]; Canned-body directory, defaults to `canned/` next to the registry file.
    :return: Registry
    """
    path = path or Config().get('registry') or DEFAULT_REGISTRY_PATH
    if canned_dir is None:
        canned_dir = DEFAULT_CANNED_DIR if path == DEFAULT_REGISTRY_PATH else \
            os.path.join(os.path.dirname(os.path.abspath(path)), 'canned')
    try:
        with open(path, encoding='utf-8') as file:
            obj = yaml.safe_load(file) or {}
    except yaml.YAMLError as err:
        raise RegistryError('{}: {}'.format(path, err))
    tools = [_tool_from_dict(entry) for entry in obj.get('tools') or []]
    registry = Registry(tools, _load_canned(canned_dir) if os.path.isdir(canned_dir) else {})
    logger.debug('Loaded %d tool(s) from %s', len(registry), path)
    return registry
