import sys

from macap_cli.config import load_config

class Context:
    """Holds global context related to the invocation of the tool"""

    def __init__(self):
        self.options = None
        self.compact = False
        self.configured = False

    def configure(self, options):
        self.options = options
        self.__dict__.update(options)
        self.configured = True

    def experiment_config(self, **overrides):
        """ExperimentConfig from --config with command flags overriding it

        --workers on the root group applies unless the command passes its own.
        """
        options = self.options or {}
        if overrides.get('workers') is None:
            overrides['workers'] = options.get('workers')
        return load_config(options.get('config'), **overrides)

sys.modules[__name__] = Context()
