# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet setup file**
"""
import os

from setuptools import setup, find_packages

from setup_helpers import get_version, readme

INSTALL_REQUIRE = ['numpy>=1.22', 'pandas>=1.5', 'pluginlib>=0.9', 'scikit-learn>=1.1',
                   'scipy>=1.8', 'setuptools<81']

setup(
    name='airnet',
    version=get_version(os.path.join('airnet', '__init__.py')),
    description='Delay propagation in multi-layer air traffic networks',
    long_description=readme('README.rst'),
    license='MPLv2.0',
    author='Airnet Developers',
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={'airnet': ['data/*.csv']},
    install_requires=INSTALL_REQUIRE,
    python_requires='>=3.8',
    entry_points={'console_scripts': ['airnet = airnet.cli:main']},
    zip_safe=False,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Mozilla Public License 2.0 (MPL 2.0)',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Programming Language :: Python :: 3.13',
        'Topic :: Scientific/Engineering',
    ],
    keywords='air traffic, queueing, delay propagation, route mining',
    test_loader="unittest:TestLoader"
)
