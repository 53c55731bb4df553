import functools
import json

import click

from macap_cli import context
from macap_cli.config import FIELDS
from macap_cli.errors import MacapError

def format_output(value):
    """Return pretty string representation of value suitable for displaying

    Typically value is a Dict in which case it is pretty printed
    """
    indent, separators = (None, (',', ':')) if context.compact else (2, None)
    # Non-json str outputs such as CSV text are shown without enclosing quotes
    if isinstance(value, str):
        return value
    return json.dumps(value, indent=indent, separators=separators)

def print_result(fn):
    """Print the result of a function to the console

    Decorator to attach to functions that return some value to display to the user
    """
    @functools.wraps(fn)
    def inner(*args, **kwargs):
        click.echo(format_output(fn(*args, **kwargs)))
    return inner

def with_library_errors(fn):
    """Report library errors as click errors so the tool exits non-zero with a message"""
    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MacapError as e:
            raise click.ClickException(str(e))
    return inner

def with_experiment_config(fn):
    """Pass the ExperimentConfig built from --config and the command's own flags

    Flags named after ExperimentConfig fields are consumed here; a flag left
    unset falls back to the config file and then to the default.
    """
    @functools.wraps(fn)
    def inner(*args, **kwargs):
        overrides = {k: kwargs.pop(k) for k in list(kwargs) if k in FIELDS}
        return fn(context.experiment_config(**overrides), *args, **kwargs)
    return inner
