"""
Setup configuration for leastgrad package.
"""

from setuptools import setup

setup(
    name='leastgrad',
    packages=['leastgrad', 'leastgrad.utils', 'leastgrad.parsers',
              'leastgrad.converters', 'leastgrad.domain', 'leastgrad.geometry',
              'leastgrad.solvers', 'leastgrad.construction'],
    package_data={'leastgrad': ['data/*.toml']},
    version='0.1.0',
    description='Level-set construction and verification of weighted least '
                'gradient minimizers on discrete grids.',
    author='leastgrad developers',
    maintainer='leastgrad developers',
    license='MIT',
    keywords=['python', 'total variation', 'least gradient', 'min-cut'],
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'PyMaxflow>=1.2.13',
        'tomli>=1.1; python_version < "3.11"',
    ],
    entry_points={'console_scripts': ['leastgrad = leastgrad.cli:main']},
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
    ],
    python_requires='>=3.9',
)
