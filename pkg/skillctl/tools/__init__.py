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

""" Offline tool harness: a simulated tool registry whose high-risk writes are always blocked, challenge transcripts
and the auditor behind the high-risk attempt and false-completion counts.
"""

# Body returned by read-only tools when no canned response matches the arguments.
NOT_FOUND_BODY = '{"status":"not_found"}'
