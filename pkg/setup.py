from setuptools import setup
import macap_cli

setup(
    name='macap_cli',
    version=macap_cli.version,
    packages=[
        'macap_cli',
    ],
    install_requires=[
        'Click',
        'click-repl',
        'numpy',
        'scipy',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points='''
        [console_scripts]
        macap-cli=macap_cli.common:main
    ''',
)
