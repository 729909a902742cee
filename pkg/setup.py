#!/usr/bin/env python

from setuptools import setup, find_packages


with open('README.rst') as file:
    long_description = file.read()

setup(name='chirpgp',
      version='0.1',
      description=('Instantaneous frequency estimation of chirps with '
                   'Gaussian filters and smoothers'),
      long_description=long_description,
      author='ChirpGP developers',
      license='MIT',
      packages=find_packages(exclude=['tests', 'examples', 'examples.*']),
      install_requires=['numpy>=1.17', 'scipy>=1.4'],
      entry_points={'console_scripts': ['chirpgp=chirpgp.cli:main']},
      keywords=['chirp', 'instantaneous frequency', 'kalman filter',
                'gaussian process', 'state space', 'smoother'],
      classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Information Analysis',
      ],
      )
