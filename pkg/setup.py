#!/usr/bin/env python
# encoding: utf-8
"""
This file contains the setup for setuptools to distribute everything as a
(PyPI) package.

"""

from setuptools import setup, find_packages

import glob

# define version
version = '0.1.dev'

# define scripts to be installed by the PyPI package
scripts = glob.glob('bin/*')

# some PyPI metadata
classifiers = ['Development Status :: 3 - Alpha',
               'Programming Language :: Python :: 3',
               'Environment :: Console',
               'License :: OSI Approved :: BSD License',
               'Topic :: Scientific/Engineering :: Mathematics',
               'Topic :: Scientific/Engineering :: Artificial Intelligence']

# installation requirements
install_requires = ['numpy>=1.15',
                    'scipy>=1.1']

# the actual setup routine
setup(name='stratopt',
      version=version,
      description='Learning optimal strategies of parametric mixed-integer '
                  'quadratic problems',
      long_description=open('README.rst').read(),
      license='BSD',
      packages=find_packages(exclude=['tests']),
      exclude_package_data={'': ['tests']},
      scripts=scripts,
      test_suite='tests',
      install_requires=install_requires,
      python_requires='>=3.5',
      classifiers=classifiers)
