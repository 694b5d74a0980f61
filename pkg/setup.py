#!/usr/bin/env python

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

""" skillctl builder and installer.
"""

import io

from setuptools import find_packages, setup
from skillctl import __version__

name = 'skillctl'
desc = 'Lint, compile, check and measure contractual agent skills (SKILL.md)'

with io.open('README.md', encoding='utf-8') as strm:
    long_desc = strm.read()

classifiers = [
    'Development Status :: 3 - Alpha',
    'Intended Audience :: Developers',
    'Operating System :: OS Independent',
    'License :: OSI Approved :: Apache Software License',
    'Programming Language :: Python',
    'Programming Language :: Python :: 3',
    'Programming Language :: Python :: 3.8',
    'Programming Language :: Python :: 3.9',
    'Programming Language :: Python :: 3.10',
    'Programming Language :: Python :: 3.11',
    'Programming Language :: Python :: Implementation'
]
author = "skillctl contributors"
packages = find_packages(exclude=['tests', 'tests.*'])

install_require = []
with io.open('requirements.txt') as f:
    install_require = [l.strip() for l in f if l.strip() and not l.startswith('#')]

setup_params = dict(
    name=name,
    version=__version__,
    description=desc,
    long_description=long_desc,
    long_description_content_type='text/markdown',
    classifiers=classifiers,
    author=author,
    packages=packages,
    package_data={'skillctl': ['data/*.yml', 'data/canned/*.yml']},
    include_package_data=True,
    setup_requires=['pytest_runner'],
    tests_require=['pytest', 'hypothesis'],
    install_requires=install_require,
    extras_require={'chaos': ['chaostoolkit'], 'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['skillctl = skillctl.cli:run']},
    python_requires='>=3.8'
)


def main():
    """Package installation entry point."""
    setup(**setup_params)


if __name__ == '__main__':
    main()
