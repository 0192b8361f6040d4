from os.path import dirname, realpath, exists
from setuptools import setup, find_packages
import sys


author = u"pairvar developers"
authors = [author]
description = 'variance functions and valid inference for paired ' \
              + 'replicate intensity data'
name = 'pairvar'
year = "2026"

sys.path.insert(0, realpath(dirname(__file__))+"/"+name)
from _version import version  # noqa: E402


setup(
    name=name,
    author=author,
    version=version,
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_dir={name: name},
    include_package_data=True,
    license="MIT",
    description=description,
    long_description=open('README.rst').read() if exists('README.rst') else '',
    install_requires=[
        "appdirs",
        "numpy>=1.20.0",
        "pandas>=1.5.0",  # CSV ingestion and emission
        "scipy>=1.7.0",  # chi2 tails, logsumexp, optimize
        ],
    extras_require={
        "tests": ["pytest"],
        },
    python_requires='>=3.9, <4',
    entry_points={
       "console_scripts": [
           "pairvar = pairvar.cli:main",
            ],
       },
    keywords=["variance function",
              "iTRAQ",
              "mixture model",
              "confidence intervals",
              "proteomics",
              ],
    classifiers=[
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Intended Audience :: Science/Research'
                 ],
    platforms=['ALL'],
    )
