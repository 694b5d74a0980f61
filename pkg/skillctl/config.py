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

""" Global configuration for skillctl.
"""

import copy
import json
import os

import yaml
from logzero import logger

from skillctl.util import Singleton

DEFAULTS = {
    'description-budget': 500,
    'rules': None,
    'registry': None,
    'reciprocal-pair': ['gpt-5.5', 'claude-opus-4-7'],
    'tie-epsilon': 1e-9,
    'records-per-model': 24,
    'dimensions': ['quality', 'utility', 'governance', 'reliability'],
    'profiles': {},
    'aliases': {},
    'jobs': 4,
}


class Config(dict, metaclass=Singleton):
    """
    Global configuration for skillctl. This is a singleton and only needs to have the values loaded once.
    """

    def __init__(self):
        super().__init__()
        self.reset()

    def reset(self):
        """
        Drop everything that was loaded and go back to the built-in defaults.
        """
        self.clear()
        self.update(copy.deepcopy(DEFAULTS))

    def load_yaml(self, path):
        """
        Load configuration from a yaml file.
        :param path: Path to configuration file.
        """
        with open(path, encoding='utf-8') as file:
            obj = yaml.safe_load(file) or {}
        self.load_dict(obj)

    def load_json(self, path):
        """
        Load configuration from a json file.
        :param path: Path to configuration file.
        """
        with open(path, encoding='utf-8') as file:
            self.load_dict(json.load(file))

    def load_dict(self, dictionary):
        """
        Load configuration from a dictionary.
        :param dictionary: Dictionary to read from.
        """
        for (key, value) in dictionary.items():
            self[key] = value

    def load_env(self, environ=None):
        """
        Pick up `SKILLCTL_CONFIG` (a config file to load) and `SKILLCTL_RULES` (default ruleset path).
        :param environ: Optional[Dict[str, str]]; Environment to read, defaults to `os.environ`.
        """
        environ = os.environ if environ is None else environ
        path = environ.get('SKILLCTL_CONFIG')
        if path:
            logger.debug('Loading configuration from %s', path)
            if path.endswith('.json'):
                self.load_json(path)
            else:
                self.load_yaml(path)
        rules = environ.get('SKILLCTL_RULES')
        if rules:
            self['rules'] = rules
