"""Parse zoo identifiers such as ``two_sided_pareto(alpha=1,beta=2)``.

Strings are parsed with :mod:`ast` (never evaluated).  Arguments are numbers,
tuples, or nested zoo calls, so ``product(g=pareto(theta=2,c=0.2))`` works.
"""
from __future__ import annotations

import ast
import dataclasses

from .. import dependence as dep
from .. import weights as wts
from ..asymptotics import StoppingTime
from ..dist_core import zoo
from ..errors import ConfigError, RwsumError

MODELS = {c.zoo_name: c for c in (
    zoo.TwoSidedPareto, zoo.SymmetricPareto, zoo.ParetoWeight, zoo.LogPerturbedPareto,
    zoo.InversePowerLog, zoo.OscillatingTail, zoo.IntegratedOscillatingTail, zoo.TwoPieceWeight,
    zoo.Degenerate, zoo.Exponential, zoo.Scaled, zoo.SumModel, zoo.UtaiMarginal)}

DEPENDENCE = {c.zoo_name: c for c in (
    dep.Independent, dep.UtaiSum, dep.QuantileAntithetic, dep.NuodPairwise)}

WEIGHTS = {c.zoo_name: c for c in (
    wts.FixedVector, wts.ProductIID, wts.IndependentIID, wts.WindowEndpoints)}

STOPPING = {
    "deterministic": StoppingTime.deterministic,
    "geometric": StoppingTime.geometric,
    "infinite": StoppingTime.infinite,
    "pmf": StoppingTime.from_pmf,
}

ALL = {**MODELS, **DEPENDENCE, **WEIGHTS, **STOPPING}


def _field_names(target):
    if dataclasses.is_dataclass(target):
        return [f.name for f in dataclasses.fields(target)]
    code = getattr(target, "__code__", None) or target.__func__.__code__
    names = code.co_varnames[:code.co_argcount]
    return [n for n in names if n not in ("cls", "self")]


def _convert(node, src, registry, extra):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_convert(node.operand, src, registry, extra)
    if isinstance(node, (ast.Tuple, ast.List)):
        return tuple(_convert(e, src, registry, extra) for e in node.elts)
    if isinstance(node, ast.Name):
        if node.id in ("true", "false"):
            return node.id == "true"
        if node.id in extra:
            return extra[node.id]
        return _build(node.id, [], [], node, src, registry, extra)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        return _build(node.func.id, node.args, node.keywords, node, src, registry, extra)
    raise ConfigError(f"unsupported expression {ast.get_source_segment(src, node)!r}",
                      position=node.col_offset)


def _build(name, args, keywords, node, src, registry, extra):
    target = registry.get(name) or ALL.get(name)
    if target is None:
        raise ConfigError(f"unknown identifier {name!r}", position=node.col_offset)
    names = _field_names(target)
    lower = {n.lower(): n for n in names}
    kw = {}
    for i, a in enumerate(args):
        if i >= len(names):
            raise ConfigError(f"too many arguments for {name}", position=a.col_offset)
        kw[names[i]] = _convert(a, src, registry, extra)
    for k in keywords:
        key = lower.get(k.arg.lower()) if k.arg else None
        if key is None:
            raise ConfigError(f"{name} has no parameter {k.arg!r}", position=k.value.col_offset)
        kw[key] = _convert(k.value, src, registry, extra)
    try:
        return target(**kw)
    except (RwsumError, TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}", position=node.col_offset) from exc


def parse_spec(text, registry=None, extra=None):
    """Build the object named by a zoo identifier string."""
    text = text.strip()
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse {text!r}: {exc.msg}", position=(exc.offset or 1) - 1) from exc
    return _convert(tree.body, text, registry or ALL, extra or {})


def parse_model(text):
    return parse_spec(text, MODELS)


def parse_dependence(text, F=None):
    """``independent`` alone means independent copies of F."""
    if text.strip() == "independent":
        if F is None:
            raise ConfigError("independent needs an increment model", position=0)
        return dep.Independent(F)
    return parse_spec(text, {**MODELS, **DEPENDENCE}, extra={"F": F} if F is not None else None)


def parse_weights(text):
    return parse_spec(text, {**MODELS, **WEIGHTS})


def parse_stopping(text):
    return parse_spec(text, STOPPING)
