# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
from setuptools import find_packages
from setuptools import setup

from nafdsim import __version__


setup(
    name="nafdsim",
    version=__version__,
    description="Spectral/energy efficiency analysis and ADC bit allocation "
                "for network-assisted full-duplex distributed massive MIMO.",
    packages=find_packages(exclude=("tests", "tests.*")),
    include_package_data=True,
    zip_safe=False,
    python_requires=">=3.7",
    install_requires=[
        "numpy",
        "scipy",
        "typed-config",
    ],
    extras_require={
        "test": ["pytest", "mock", "coverage"],
    },
    entry_points={
        'console_scripts': [
            'nafdsim = nafdsim.main:main',
        ],
    },
)
