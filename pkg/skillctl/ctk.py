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

""" Chaos toolkit utility function(s).
"""

from chaoslib.exceptions import FailedActivity
from logzero import logger

from skillctl.config import Config
from skillctl.errors import SkillctlError


def run_ctk(func, cfg, msg=None):
    """
    This is a helper function to reduce code duplication when called by Chaos Toolkit.
    :param func: Fn[] -> Dict[str, any]; Performs the probe and returns its report.
    :param cfg: Dict[str, any]; Configuration from the experiment, loaded into `Config` first.
    :param msg: Optional[str]; A message to display at the beginning of operations.
    :return: Dict[str, any]; The report returned by `func`.
    :raises FailedActivity: The probe could not run (bad or undecodable input files, unreadable paths).
    """
    if cfg:
        Config().load_dict(cfg)
    if msg:
        logger.info(msg)

    try:
        result = func()
    except (SkillctlError, OSError, UnicodeDecodeError) as err:
        logger.exception(err)
        raise FailedActivity(str(err))

    logger.info("Done!")
    return result
