#!/usr/bin/env python
# encoding: utf8

import os
import re
from setuptools import setup


here = os.path.dirname(os.path.abspath(__file__))

# Figure out the version
version_re = re.compile(
    r'__version__ = (\(.*?\))')
with open(os.path.join(here, 'dynlab/__init__.py')) as fp:
    for line in fp:
        match = version_re.search(line)
        if match:
            version = ".".join(map(str, eval(match.group(1))))
            break
    else:
        raise Exception("Cannot find version in dynlab/__init__.py")

setup(name='dynlab',
      version=version,
      description="Finite-sample diagnostics for topological dynamical "
                  "systems: sensitivity, fragmentation, subshifts, "
                  "enveloping semigroups and chain recurrence.",
      classifiers=[
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Topic :: Scientific/Engineering :: Mathematics',
      ],
      license='BSD',
      packages=['dynlab'],
      package_dir = {'dynlab': 'dynlab'},
      python_requires='>=3.8',
      install_requires = ['numpy', 'scipy', 'joblib', 'termcolor', 'colorama'],
      entry_points="""[console_scripts]\ndynlab = dynlab:run\n""",
      zip_safe=False,
      )
