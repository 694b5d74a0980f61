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

import pytest

from skillctl.config import Config
from skillctl.rules import load_ruleset
from tests import read_fixture


@pytest.fixture(autouse=True)
def cfg(monkeypatch):
    monkeypatch.delenv('SKILLCTL_RULES', raising=False)
    monkeypatch.delenv('SKILLCTL_CONFIG', raising=False)
    cfg = Config()
    cfg.reset()
    yield cfg
    cfg.reset()


@pytest.fixture
def ruleset():
    return load_ruleset()


@pytest.fixture
def sales_skill():
    return read_fixture('skills', 'sales-growth', 'SKILL.md')
