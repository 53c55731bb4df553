import click

from macap_cli.benchmarks import Scheme

class FloatList(click.ParamType):
    """Comma separated list of numbers, e.g. 1,2,3.5"""
    name = 'floats'

    def __init__(self, cast=float):
        self.cast = cast

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        try:
            return [self.cast(item) for item in value.split(',') if item.strip()]
        except ValueError:
            self.fail("{!r} is not a comma separated list of numbers".format(value), param, ctx)

class IntList(FloatList):
    name = 'ints'

    def __init__(self):
        super().__init__(cast=int)

class SchemeList(click.ParamType):
    name = 'schemes'

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        if value.strip().lower() == 'all':
            return [s.value for s in Scheme]
        try:
            return [Scheme.parse(item).value for item in value.split(',') if item.strip()]
        except ValueError as e:
            self.fail(str(e), param, ctx)
