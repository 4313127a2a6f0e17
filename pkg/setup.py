#!/usr/bin/env python

# Copyright 2026 The uwqkd-tools developers
#
# This file is part of uwqkd-tools.
#
# uwqkd-tools is free software: you can redistribute it and/or modify it
# under the terms of the GNU Lesser General Public License as published
# by the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# uwqkd-tools is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with uwqkd-tools. If not, see <http://www.gnu.org/licenses/>.

# uwqkd-tools package setup script.

from setuptools import setup

DESC = 'Link-budget engine for underwater BB84 polarization quantum key distribution.'

setup(name='uwqkd',
      version='0.1.0',
      description=DESC,
      long_description=open('README.rst', encoding='utf-8').read(),
      license='LGPLv3+',
      packages=['uwqkd'],
      package_data={'uwqkd': ['data/radiance.csv']},
      python_requires='>=3.8',
      install_requires=['numpy>=1.20', 'scipy>=1.6', 'matplotlib>=3.3'],
      extras_require={'test': ['pytest>=7']},
      entry_points={'console_scripts': ['uwqkd = uwqkd.cli:main']},
)
