"""Network service hosting text classifiers behind a newline-delimited JSON
protocol, so attack engines can query models beyond their built-ins."""

from .backends import BACKENDS, Backend, LinearBagOfWords, fit_linear_bow, load_backend
from .server import ClassifierServer, Mode, ServerConfig, serve

__version__ = "0.1.0"
