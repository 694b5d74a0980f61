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

""" Exceptions raised by skillctl.
"""


class SkillctlError(Exception):
    """
    Base for every error skillctl raises on purpose. Carries an optional 1-based line number.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self):
        if self.line is None:
            return self.message
        return '{} (line {})'.format(self.message, self.line)


class MalformedFrontmatter(SkillctlError):
    """SKILL.md frontmatter block could not be parsed."""


class ContractSourceError(SkillctlError):
    """Contract source failed YAML syntax or schema checks."""

    def __init__(self, message, line=None, key=None):
        super().__init__(message, line)
        self.key = key


class RuleSetError(SkillctlError):
    """A rule file is malformed or a pattern falls outside the supported subset."""


class RegistryError(SkillctlError):
    """A tool registry file is malformed."""


class InvariantViolation(SkillctlError):
    """Input data breaks an invariant the auditor relies on."""


class TranscriptError(SkillctlError):
    """A transcript file line could not be read."""


class JudgeRecordError(SkillctlError):
    """A judge-record row could not be read."""


class ManifestError(SkillctlError):
    """A run manifest is malformed."""
