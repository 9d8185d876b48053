"""Pseudo-chart construction, verification and obstruction checks."""

import functools
import json

from . import _pseudochart as _core

__version__ = _core.version()

BACKENDS = tuple(_core.backends())

EXIT_OK = 0
EXIT_VERIFICATION_FAILURE = 2
EXIT_BAD_INPUT = 3
EXIT_CENTER_MEETS_VARIETY = 4
EXIT_INCONCLUSIVE_BUDGET = 5


class PseudochartError(Exception):
    def __init__(self, message, code, witness=None):
        super().__init__(message)
        self.code = code
        self.witness = witness


def _translate(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _core.Error as e:
            message, code, witness = e.args
            raise PseudochartError(message, code, json.loads(witness)) from None

    return wrapper


def _document(pair):
    text, code = pair
    return json.loads(text), code


@_translate
def construct(construction, n=2, degrees=(0, 2), seed=1):
    """Chart or bundle-atlas document and exit code."""
    return _document(_core.construct(construction, n, list(degrees), seed))


@_translate
def verify(document, seed=1, samples=25, backend="auto", p=11, k=2):
    """Verification report and exit code for a construct document or bare chart."""
    if not isinstance(document, str):
        document = json.dumps(document)
    return _document(_core.verify(document, seed, samples, backend, p, k))


@_translate
def obstruct(curve="", surface=""):
    return _document(_core.obstruct(curve, surface))


@_translate
def erratum(n=3, samples=25, seed=1):
    return _document(_core.erratum(n, samples, seed))


@_translate
def curve_smoothness(curve):
    return json.loads(_core.curve_smoothness(curve))


@_translate
def plane_curve_genus(curve):
    return _core.plane_curve_genus(curve)


@_translate
def curve_complement_verdict(curve):
    return json.loads(_core.curve_complement_verdict(curve))


@_translate
def boundary_verdict(model):
    if not isinstance(model, str):
        model = json.dumps(model)
    return json.loads(_core.boundary_verdict(model))


@_translate
def catalog():
    return json.loads(_core.catalog())


@_translate
def rank_q(rows):
    return _core.rank_q([[str(x) for x in row] for row in rows])
