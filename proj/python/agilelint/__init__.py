"""Python bindings for the agilelint core.

Documents are passed as Python objects and cross into C++ as JSON text.
Failures raise :class:`Error` with ``code`` set to the library error code.
"""

import json

from . import _core

__all__ = [
    "Error",
    "builtin_catalog",
    "data_version",
    "eval_rating",
    "evaluate",
    "generate_fixture",
    "ingest",
    "report",
    "run_query",
    "validate_catalog",
]

Error = _core.Error
Error.code = property(lambda self: self.args[0] if self.args else None)
Error.__str__ = lambda self: self.args[1] if len(self.args) > 1 else super(Error, self).__str__()


def _dump(document):
    if document is None:
        return ""
    return document if isinstance(document, str) else json.dumps(document)


def eval_rating(expression, **bindings):
    """Evaluates a rating expression; the result is clamped to [0, 100]."""
    return _core.eval_rating(expression, {k: float(v) for k, v in bindings.items()})


def run_query(query, snapshot, **placeholders):
    """Runs an MQL query; returns ``{"columns": [...], "rows": [[str, ...]]}``."""
    return json.loads(_core.run_query(query, _dump(snapshot), _dump(placeholders)))


def generate_fixture(seed=42, scale=""):
    """Synthetic exports plus the manifest of injected violations."""
    return json.loads(_core.generate_fixture(seed, scale))


def ingest(issues, commits=None, runs=None):
    """Loads export documents into a graph snapshot."""
    return json.loads(_core.ingest(_dump(issues), _dump(commits), _dump(runs)))


def data_version(snapshot):
    return _core.data_version(_dump(snapshot))


def builtin_catalog():
    return json.loads(_core.builtin_catalog())


def validate_catalog(catalog):
    """Returns the normalized catalog or raises Error with code CatalogInvalid."""
    return json.loads(_core.validate_catalog(_dump(catalog)))


def evaluate(snapshot, catalog=None, config=None):
    """Every metric for every team and sprint, as a list of result objects."""
    return json.loads(_core.evaluate(_dump(snapshot), _dump(catalog), _dump(config)))


def report(results, format="json", team=None, sprint=None):
    text = _core.report(json.dumps(results), format, team, sprint)
    return json.loads(text) if format == "json" else text
