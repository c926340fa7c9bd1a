"""Experiment configuration: an INI file with three sections.

    [experiment]
    pipeline = verify            ; verify | ruin | stopped | breiman | checks | tail-eval
    estimator = auto             ; auto | oracle | crude | conditional | ak
    samples = 100000
    seed = 20240601
    tolerance = 0.05
    threads = 1
    output = results

    [model]
    increments = two_sided_pareto(alpha=1,beta=2)
    dependence = independent
    weights = fixed(w=(1,1))
    discount = pareto(theta=2,c=0.2)
    stopping = geometric(q=0.5,n_max=60)
    window = power(gamma=0.8,gamma1=0.1,gamma2=0.4)
    p = 1.5
    case = auto
    form = rv
    checks = weight
    lag = 1

    [grid]
    x = 100, 1000, 10000
    n = 1, 2, 5
    oracle_grid = 32768

Only ``increments`` and the grid are required.  ``render`` writes every key in
a fixed order, so the rendered text doubles as the canonical form that the
manifest digest is taken over.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import re
from dataclasses import dataclass

from ..dist_core.window import capped_window, log_window, weight_window
from ..errors import ConfigError, RwsumError
from .zoo import parse_dependence, parse_model, parse_spec, parse_stopping, parse_weights

PIPELINES = ("verify", "ruin", "stopped", "breiman", "checks", "tail-eval")
ESTIMATORS = ("auto", "oracle", "crude", "conditional", "ak")

# (section, key, attribute, kind)
LAYOUT = (
    ("experiment", "pipeline", "pipeline", str),
    ("experiment", "estimator", "estimator", str),
    ("experiment", "samples", "N", int),
    ("experiment", "seed", "seed", int),
    ("experiment", "tolerance", "tolerance", float),
    ("experiment", "threads", "threads", int),
    ("experiment", "output", "output", str),
    ("model", "increments", "increments", str),
    ("model", "dependence", "dependence", str),
    ("model", "weights", "weights", str),
    ("model", "discount", "discount", str),
    ("model", "stopping", "stopping", str),
    ("model", "window", "window", str),
    ("model", "p", "p", float),
    ("model", "case", "case", str),
    ("model", "form", "form", str),
    ("model", "checks", "checks", str),
    ("model", "lag", "lag", float),
    ("grid", "x", "x_grid", "floats"),
    ("grid", "n", "n_list", "ints"),
    ("grid", "oracle_grid", "grid_n", int),
)


@dataclass(frozen=True)
class ExperimentConfig:
    increments: str
    x_grid: tuple
    n_list: tuple = (1,)
    pipeline: str = "verify"
    estimator: str = "auto"
    N: int = 100_000
    seed: int = 0
    tolerance: float = 0.05
    threads: int = 1
    output: str = "results"
    dependence: str = "independent"
    weights: str = ""
    discount: str = ""
    stopping: str = ""
    window: str = ""
    p: float = 1.5
    case: str = "auto"
    form: str = "rv"
    checks: str = "weight"
    lag: float = 1.0
    grid_n: int = 1 << 15

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    # --- resolved objects ---------------------------------------------------
    def model(self):
        return parse_model(self.increments)

    def dependence_spec(self):
        return parse_dependence(self.dependence, self.model())

    def weight_process(self):
        return parse_weights(self.weights) if self.weights else None

    def discount_model(self):
        if not self.discount:
            raise ConfigError("pipeline needs [model] discount", position="model.discount")
        return parse_model(self.discount)

    def stopping_time(self):
        return parse_stopping(self.stopping) if self.stopping else None

    def case_label(self):
        return None if self.case == "auto" else self.case

    def weight_window(self):
        """power(gamma, gamma1, gamma2) | log(gamma1) | capped(<window>, x0)."""
        if not self.window:
            return None
        F = self.dependence_spec().marginal()
        p = self.p
        builders = {
            "power": lambda gamma, gamma1, gamma2: weight_window(F, p, gamma, gamma1, gamma2),
            "log": lambda gamma1=0.1: log_window(gamma1),
            "capped": lambda window, x0: capped_window(window, x0),
        }
        return parse_spec(self.window, builders)

    def digest(self):
        return hashlib.sha256(render(self).encode("utf-8")).hexdigest()


def _fmt(v, kind):
    if kind == "floats":
        return ", ".join(repr(float(x)) for x in v)
    if kind == "ints":
        return ", ".join(str(int(x)) for x in v)
    if kind is float:
        return repr(float(v))
    return str(v)


def render(cfg: ExperimentConfig) -> str:
    out = []
    section = None
    for sec, key, attr, kind in LAYOUT:
        if sec != section:
            if section is not None:
                out.append("")
            out.append(f"[{sec}]")
            section = sec
        out.append(f"{key} = {_fmt(getattr(cfg, attr), kind)}")
    return "\n".join(out) + "\n"


def _line_of(text, section, key):
    sec = None
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            sec = m.group(1).strip()
        elif sec == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return i
    return 0


def _convert(raw, kind):
    if kind == "floats":
        return tuple(float(v) for v in raw.split(",") if v.strip())
    if kind == "ints":
        return tuple(_as_int(v) for v in raw.split(",") if v.strip())
    if kind is int:
        return _as_int(raw)
    return kind(raw)


def _as_int(raw):
    """Integers, also written as 1e7."""
    try:
        return int(raw)
    except ValueError:
        f = float(raw)
        if not f.is_integer():
            raise
        return int(f)


def parse(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}", position=getattr(exc, "lineno", 0)) from exc
    known = {(s, k) for s, k, _, _ in LAYOUT}
    for sec in cp.sections():
        for key in cp[sec]:
            if (sec, key) not in known:
                raise ConfigError(f"unknown key {sec}.{key}", position=_line_of(text, sec, key))
    kw = {}
    for sec, key, attr, kind in LAYOUT:
        if cp.has_option(sec, key):
            raw = cp.get(sec, key).strip()
            try:
                kw[attr] = _convert(raw, kind)
            except ValueError as exc:
                raise ConfigError(f"{sec}.{key}: cannot read {raw!r}",
                                  position=_line_of(text, sec, key)) from exc
    for req in ("increments", "x_grid"):
        if req not in kw:
            sec, key = next((s, k) for s, k, a, _ in LAYOUT if a == req)
            raise ConfigError(f"missing required key {sec}.{key}", position=0)
    cfg = ExperimentConfig(**kw)
    validate(cfg, text)
    return cfg


def validate(cfg: ExperimentConfig, text=""):
    def where(attr):
        sec, key = next((s, k) for s, k, a, _ in LAYOUT if a == attr)
        return _line_of(text, sec, key) if text else f"{sec}.{key}"

    if cfg.pipeline not in PIPELINES:
        raise ConfigError(f"unknown pipeline {cfg.pipeline!r}", position=where("pipeline"))
    if cfg.estimator not in ESTIMATORS:
        raise ConfigError(f"unknown estimator {cfg.estimator!r}", position=where("estimator"))
    if not cfg.x_grid:
        raise ConfigError("empty x grid", position=where("x_grid"))
    if not cfg.n_list or min(cfg.n_list) < 1:
        raise ConfigError("n list must hold positive integers", position=where("n_list"))
    if cfg.case not in ("auto", "Case1", "Case2", "Case3"):
        raise ConfigError(f"unknown case {cfg.case!r}", position=where("case"))
    for attr, fn in (("increments", lambda c: c.model()), ("dependence", lambda c: c.dependence_spec()),
                     ("weights", lambda c: c.weight_process()),
                     ("stopping", lambda c: c.stopping_time()),
                     ("window", lambda c: c.weight_window())):
        try:
            fn(cfg)
        except ConfigError as exc:
            raise ConfigError(f"{attr}: {exc.args[0]}", position=where(attr)) from exc
        except RwsumError as exc:
            raise ConfigError(f"{attr}: {exc}", position=where(attr)) from exc
    if cfg.discount:
        try:
            cfg.discount_model()
        except RwsumError as exc:
            raise ConfigError(f"discount: {exc}", position=where("discount")) from exc
    return cfg


def load(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
