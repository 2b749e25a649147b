"""Command-line front end.

Usage::

    dpplln SUBCOMMAND [--config FILE.yaml] [overrides...]

Subcommands: kernel, sample, oracle-check, lln, converge, decorrelate.
Configuration files are YAML mappings; dotted keys such as ``g.coeffs`` may
be written flat or nested.  Command-line flags override the file.  Exit
status is 0 on success, 1 when a numerical tolerance is not met and 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import __version__
from .combinatorics import Pattern, SitePP, pp_map, shur_map
from .contour import QuadSettings
from .dpp import (
    OracleModel,
    RngSeed,
    WindowConfig,
    all_subpatterns,
    det_small,
    oracle_expectation,
    sample_plancherel_many,
    sample_plane_partition,
    sample_window,
)
from .errors import ConfigError, ConvergenceError, DpplnError, TailTooLargeError
from .kernels import KernelSpec, kernel_matrix, fourier_projection_kernel
from .lln import (
    PlanePartitionModel,
    SchurModel,
    TestFunction,
    convergence_study,
    decorrelation_study,
    run_lln_experiment,
)
from .specialfn import GCoefficients, QParam

SUBCOMMANDS = ("kernel", "sample", "oracle-check", "lln", "converge", "decorrelate")
MODELS = ("schur", "sine", "fourier", "pp", "extended_sine")

# key -> default (None means "no default")
_COMMON = {
    "model": None,
    "output": None,
    "seed": None,
    "workers": None,
    "tol": 1e-10,
    "max_nodes": 65536,
    "theta": None,
    "g.coeffs": None,
    "alpha": None,
    "q": None,
    "r": None,
}
_KEYS = {
    "kernel": {"sites": None, "u": None, "tau": None, "chi": None},
    "sample": {"window": None, "samples": 1, "steps": None, "box": None},
    "oracle-check": {"window": None, "max_size": 2, "max_weight": None, "tolerance": 1e-6, "accuracy": 1e-10},
    "lln": {"pattern": [], "f.kind": None, "f.params": None, "replicas": None, "steps": None, "box": None},
    "converge": {"pattern": None, "position": None, "scales": None},
    "decorrelate": {"pattern": None, "pairs": None, "scale": None},
}
_REQUIRED = {
    "kernel": ("model", "sites"),
    "sample": ("model", "window", "seed"),
    "oracle-check": ("model",),
    "lln": ("model", "f.kind", "f.params", "replicas", "seed"),
    "converge": ("model", "pattern", "position", "scales"),
    "decorrelate": ("model", "pattern", "pairs", "scale"),
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration for one subcommand."""

    subcommand: str
    params: Mapping[str, Any] = field(default_factory=dict)
    output: str | None = None
    seed: int | None = None

    def get(self, key: str, default: Any = None) -> Any:
        v = self.params.get(key)
        return default if v is None else v

    def echo(self) -> dict:
        """Plain-data echo of every setting, written into each output file."""
        # worker count and destination do not affect results, so they stay out
        # of the echo and outputs remain byte-identical across them
        skip = ("workers", "output")
        return {"subcommand": self.subcommand, **{k: _plain(v) for k, v in sorted(self.params.items()) if k not in skip}}


def _plain(v: Any) -> Any:
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, Fraction):
        return float(v)
    return v


# ---------------------------------------------------------------------------
# Parsing


def _flatten(d: Mapping, prefix: str = "") -> dict:
    out: dict[str, Any] = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, Mapping) and key in ("g", "f"):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _key_lines(text: str) -> dict[str, int]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return {}
    lines: dict[str, int] = {}

    def walk(n, prefix: str) -> None:
        if isinstance(n, yaml.MappingNode):
            for k, v in n.value:
                key = f"{prefix}{k.value}"
                lines[key] = k.start_mark.line + 1
                if key in ("g", "f"):
                    walk(v, key + ".")

    walk(node, "")
    return lines


def parse_config(text: str, subcommand: str | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """YAML text (plus command-line overrides) -> validated RunConfig."""
    try:
        raw = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"malformed config: {getattr(exc, 'problem', exc)}", line=line) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError("config must be a mapping of keys to values", line=1)
    lines = _key_lines(text)
    flat = _flatten(raw)
    sub = flat.pop("subcommand", None)
    sub = subcommand or sub
    if sub not in SUBCOMMANDS:
        raise ConfigError(f"unknown or missing subcommand {sub!r}; expected one of {', '.join(SUBCOMMANDS)}", key="subcommand")
    allowed = {**_COMMON, **_KEYS[sub]}
    for k in flat:
        if k not in allowed:
            raise ConfigError(f"unknown key for '{sub}'", key=k, line=lines.get(k))
    merged = dict(allowed)
    merged.update(flat)
    for k, v in (overrides or {}).items():
        if v is not None:
            merged[k] = v
    for k in _REQUIRED[sub]:
        if merged.get(k) is None:
            raise ConfigError(f"required for '{sub}'", key=k, line=lines.get(k))
    try:
        _validate(sub, merged)
    except ConfigError as exc:
        if exc.line is None and exc.key in lines:
            raise ConfigError(exc.message, key=exc.key, line=lines[exc.key]) from None
        raise
    seed = merged.get("seed")
    return RunConfig(sub, merged, merged.get("output"), seed)


def _num(d: dict, key: str, lo: float | None = None, hi: float | None = None, *, open_lo: bool = True, open_hi: bool = True):
    v = d.get(key)
    if v is None:
        return
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", key=key)
    if lo is not None and (v <= lo if open_lo else v < lo):
        raise ConfigError(f"must be {'>' if open_lo else '>='} {lo}, got {v}", key=key)
    if hi is not None and (v >= hi if open_hi else v > hi):
        raise ConfigError(f"must be {'<' if open_hi else '<='} {hi}, got {v}", key=key)
    if isinstance(v, float) and not math.isfinite(v):
        raise ConfigError("must be finite", key=key)


def _int(d: dict, key: str, lo: int) -> None:
    v = d.get(key)
    if v is None:
        return
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"expected an integer, got {v!r}", key=key)
    if v < lo:
        raise ConfigError(f"must be >= {lo}, got {v}", key=key)


def _is_pp_model(model: str) -> bool:
    return model in ("pp", "extended_sine")


def _validate(sub: str, d: dict) -> None:
    model = d["model"]
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}; expected one of {', '.join(MODELS)}", key="model")
    if sub != "kernel" and model not in ("schur", "pp"):
        raise ConfigError(f"'{sub}' supports the models schur and pp", key="model")
    _num(d, "theta", 0.0)
    _num(d, "alpha", 0.0)
    _num(d, "q", 0.0, 1.0)
    _num(d, "r", 0.0)
    _num(d, "tol", 0.0)
    _num(d, "tolerance", 0.0)
    _num(d, "accuracy", 0.0)
    _num(d, "u")
    _num(d, "tau")
    _num(d, "chi")
    _num(d, "scale", 0.0)
    _int(d, "seed", 0)
    _int(d, "workers", 1)
    _int(d, "samples", 1)
    _int(d, "max_size", 1)
    _int(d, "max_weight", 0)
    _int(d, "steps", 1)
    _int(d, "box", 1)
    _int(d, "max_nodes", 8)
    if d.get("max_nodes") is not None and d["max_nodes"] & (d["max_nodes"] - 1):
        raise ConfigError("must be a power of two", key="max_nodes")
    if sub == "lln":
        _int(d, "replicas", 0)
        if d["replicas"] < 2:
            raise ConfigError(f"must be >= 2, got {d['replicas']}", key="replicas")
    if d.get("g.coeffs") is not None:
        _coeffs(d["g.coeffs"])
    if d.get("q") is not None and d.get("r") is not None:
        raise ConfigError("give either q or r, not both", key="r")
    if model in ("schur", "sine", "fourier") and d.get("theta") is None and d.get("g.coeffs") is None:
        if sub in ("kernel", "sample", "oracle-check"):
            raise ConfigError("schur-type models need theta or g.coeffs", key="theta")
        if sub == "lln" and d.get("theta") is None and d.get("g.coeffs") is None:
            d["theta"] = 1.0
        if sub in ("converge", "decorrelate"):
            d["theta"] = 1.0
    if model in ("schur", "fourier") and sub in ("kernel", "sample") and d.get("alpha") is None:
        d["alpha"] = 1.0
    if model == "pp" and sub in ("kernel", "sample", "oracle-check") and d.get("q") is None and d.get("r") is None:
        raise ConfigError("the pp model needs q or r", key="q")
    if sub == "oracle-check" and model == "schur" and d.get("g.coeffs") is not None:
        raise ConfigError("the oracle covers the Plancherel case only; use theta", key="g.coeffs")
    pp = _is_pp_model(model)
    if d.get("sites") is not None:
        _sites(d["sites"], pp, "sites", allow_duplicates=True)
    if d.get("pattern") is not None:
        _sites(d["pattern"], pp, "pattern")
    if d.get("window") is not None:
        w = d["window"]
        need = 4 if pp else 2
        if not isinstance(w, list) or len(w) != need or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in w):
            raise ConfigError(f"expected a list of {need} numbers", key="window")
        if w[0] > w[1] or (pp and w[2] > w[3]):
            raise ConfigError("window bounds are reversed", key="window")
    if model == "kernel" or sub == "kernel":
        if model == "sine" and d.get("u") is None:
            raise ConfigError("the sine kernel needs u", key="u")
        if model == "extended_sine" and (d.get("tau") is None or d.get("chi") is None):
            raise ConfigError("the extended sine kernel needs tau and chi", key="tau")
    if sub == "lln":
        if model == "schur" and d.get("alpha") is None:
            raise ConfigError("required for the schur model", key="alpha")
        if model == "pp" and d.get("r") is None and d.get("q") is None:
            raise ConfigError("required for the pp model", key="r")
        _test_function(d)
    if sub == "converge":
        s = d["scales"]
        if not isinstance(s, list) or len(s) < 2 or any(isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0 for v in s):
            raise ConfigError("expected a list of at least two positive numbers", key="scales")
        want = sorted(s) if model == "schur" else sorted(s, reverse=True)
        if s != want:
            raise ConfigError("scales must be increasing (alpha) or decreasing (r)", key="scales")
        _position(d["position"], pp, "position")
    if sub == "decorrelate":
        pairs = d["pairs"]
        if not isinstance(pairs, list) or not pairs:
            raise ConfigError("expected a nonempty list of position pairs", key="pairs")
        for p in pairs:
            if not isinstance(p, list) or len(p) != 2:
                raise ConfigError("each pair must hold two positions", key="pairs")
            _position(p[0], pp, "pairs")
            _position(p[1], pp, "pairs")


def _coeffs(c) -> tuple[complex, ...]:
    if not isinstance(c, list) or not c:
        raise ConfigError("expected a nonempty list", key="g.coeffs")
    out = []
    for v in c:
        if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
            out.append(complex(v[0], v[1]))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            raise ConfigError(f"coefficient {v!r} is neither a number nor [re, im]", key="g.coeffs")
    return tuple(out)


def _half(v, key: str) -> int:
    try:
        h2 = Fraction(str(v)) * 2
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{v!r} is not a number", key=key) from None
    if h2.denominator != 1:
        raise ConfigError(f"height {v!r} is not a multiple of 1/2", key=key)
    return int(h2)


def _sites(raw, pp: bool, key: str, allow_duplicates: bool = False) -> list:
    if not isinstance(raw, list):
        raise ConfigError("expected a list of sites", key=key)
    out = []
    for s in raw:
        if pp:
            if not isinstance(s, list) or len(s) != 2 or isinstance(s[0], bool) or not isinstance(s[0], int):
                raise ConfigError(f"site {s!r} must be [t, h] with integer t", key=key)
            out.append(SitePP(s[0], _half(s[1], key)))
        else:
            if isinstance(s, bool) or not isinstance(s, int):
                raise ConfigError(f"site {s!r} must be an integer", key=key)
            out.append(s)
    if not allow_duplicates and len(set(out)) != len(out):
        raise ConfigError("duplicate site", key=key)
    return out


def _position(p, pp: bool, key: str):
    if pp:
        if not isinstance(p, list) or len(p) != 2 or not all(isinstance(v, (int, float)) for v in p):
            raise ConfigError(f"position {p!r} must be [tau, chi]", key=key)
        return (float(p[0]), float(p[1]))
    if isinstance(p, bool) or not isinstance(p, (int, float)):
        raise ConfigError(f"position {p!r} must be a number u", key=key)
    return float(p)


def _test_function(d: dict) -> TestFunction:
    kind, params = d["f.kind"], d["f.params"]
    if not isinstance(params, Mapping):
        raise ConfigError("expected a mapping", key="f.params")
    need = {"bump": ("center", "width"), "polynomial": ("coeffs", "support"), "tabulated": ("grid", "values")}
    if kind not in need:
        raise ConfigError(f"unknown test function kind {kind!r}", key="f.kind")
    for k in params:
        if k not in need[kind]:
            raise ConfigError("unknown key", key=f"f.params.{k}")
    for k in need[kind]:
        if k not in params:
            raise ConfigError("required", key=f"f.params.{k}")
    try:
        f = getattr(TestFunction, kind)(*(params[k] for k in need[kind]))
    except (DpplnError, ValueError, TypeError, IndexError) as exc:
        raise ConfigError(str(exc), key="f.params") from None
    want = 2 if d["model"] == "pp" else 1
    if f.dim != want:
        raise ConfigError(f"the {d['model']} model needs a {want}-D test function", key="f.params")
    return f


# ---------------------------------------------------------------------------
# Helpers shared by the subcommands


def _g(cfg: RunConfig) -> GCoefficients:
    if cfg.params.get("g.coeffs") is not None:
        return GCoefficients(_coeffs(cfg.params["g.coeffs"]))
    return GCoefficients.plancherel(float(cfg.get("theta", 1.0)))


def _qparam(cfg: RunConfig) -> QParam:
    if cfg.params.get("r") is not None:
        return QParam.from_r(float(cfg.params["r"]))
    return QParam.from_q(float(cfg.params["q"]))


def _quad(cfg: RunConfig) -> QuadSettings:
    return QuadSettings(tol=float(cfg.get("tol")), max_nodes=int(cfg.get("max_nodes")))


def _site_text(s) -> str:
    return s.to_text() if isinstance(s, SitePP) else str(s)


def _pattern_text(m) -> str:
    return " ".join(_site_text(s) for s in m)


def _fmt(v: float) -> str:
    return repr(float(v))


def _csv(cfg: RunConfig, header: list[str], rows: list[list], extra: list[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(f"# dpplln {__version__}\n")
    buf.write(f"# config: {json.dumps(cfg.echo(), sort_keys=True)}\n")
    for line in extra:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json(cfg: RunConfig, result: dict) -> str:
    doc = {"version": __version__, "config": cfg.echo(), "result": result}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(cfg: RunConfig, text: str, out=None) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        (out or sys.stdout).write(text)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_kernel(cfg: RunConfig, out) -> int:
    model = cfg.params["model"]
    pp = _is_pp_model(model)
    sites = _sites(cfg.params["sites"], pp, "sites", allow_duplicates=True)
    if model == "schur":
        k = kernel_matrix(KernelSpec.schur(_g(cfg), float(cfg.get("alpha")), _quad(cfg)), sites)
    elif model == "fourier":
        G, alpha = _g(cfg), float(cfg.get("alpha"))
        k = np.array([[fourier_projection_kernel(G, alpha, x, y) for y in sites] for x in sites])
    elif model == "sine":
        k = kernel_matrix(KernelSpec.sine(_g(cfg), float(cfg.get("u"))), sites)
    elif model == "pp":
        k = kernel_matrix(KernelSpec.pp(_qparam(cfg), _quad(cfg)), sites)
    else:
        k = kernel_matrix(KernelSpec.extended_sine(float(cfg.get("tau")), float(cfg.get("chi"))), sites)
    rows = [[_site_text(a), _site_text(b), float(k[i, j].real), float(k[i, j].imag)] for i, a in enumerate(sites) for j, b in enumerate(sites)]
    _emit(cfg, _csv(cfg, ["x", "y", "re", "im"], rows), out)
    return 0


def _cmd_sample(cfg: RunConfig, out) -> int:
    model = cfg.params["model"]
    n = int(cfg.get("samples"))
    rng = RngSeed(int(cfg.seed))
    w = cfg.params["window"]
    rows = []
    if model == "schur":
        a, b = int(w[0]), int(w[1])
        G, alpha = _g(cfg), float(cfg.get("alpha"))
        if G.is_plancherel:
            lams = sample_plancherel_many(alpha * abs(G.c[0]), n, rng)
            confs = [WindowConfig.from_points(range(a, b + 1), shur_map(lam, (a, b))) for lam in lams]
        else:
            confs = sample_window(KernelSpec.schur(G, alpha, _quad(cfg)), list(range(a, b + 1)), rng, n)
        for i, c in enumerate(confs):
            rows.append([i, c.bitstring(), " ".join(str(x) for x in sorted(c.points))])
        header = ["sample", "bits", "points"]
    else:
        q = _qparam(cfg)
        win = (int(w[0]), int(w[1]), _half(w[2], "window"), _half(w[3], "window"))
        for i in range(n):
            pi = sample_plane_partition(q, cfg.get("steps"), rng.child(i), cfg.get("box"))
            pts = sorted(pp_map(pi, win))
            rows.append([i, pi.to_text(), " ".join(s.to_text() for s in pts)])
        header = ["sample", "plane_partition", "points"]
    _emit(cfg, _csv(cfg, header, rows), out)
    return 0


def _cmd_oracle(cfg: RunConfig, out) -> int:
    model = cfg.params["model"]
    max_size = int(cfg.get("max_size"))
    tol = float(cfg.get("tolerance"))
    acc = float(cfg.get("accuracy"))
    if model == "schur":
        theta = float(cfg.get("theta"))
        w = cfg.params.get("window") or [-4, 2]
        window = list(range(int(w[0]), int(w[1]) + 1))
        mw = cfg.get("max_weight", 12)
        om = OracleModel.schur_plancherel(theta)
        spec = KernelSpec.schur(GCoefficients.plancherel(theta), 1.0, _quad(cfg))
        owin = None
    else:
        q = _qparam(cfg)
        w = cfg.params.get("window") or [-2, 2, -2.5, 2.5]
        t0, t1, h0, h1 = int(w[0]), int(w[1]), _half(w[2], "window"), _half(w[3], "window")
        window = [SitePP(t, h2) for t in range(t0, t1 + 1) for h2 in range(h0, h1 + 1) if SitePP(t, h2).admissible]
        mw = cfg.get("max_weight", 30)
        om = OracleModel.plane_partition(q.q)
        spec = KernelSpec.pp(q, _quad(cfg))
        owin = window
    try:
        k = kernel_matrix(spec, window)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    idx = {s: i for i, s in enumerate(window)}
    rows, worst = [], 0.0
    for m in all_subpatterns(window, max_size):
        ii = [idx[s] for s in m]
        kv = float(det_small(k[np.ix_(ii, ii)]).real)
        try:
            ov, tail = oracle_expectation(om, m, int(mw), acc, owin)
        except TailTooLargeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        diff = abs(kv - ov)
        worst = max(worst, diff)
        rows.append([_pattern_text(m), kv, ov, diff, tail])
    _emit(cfg, _csv(cfg, ["pattern", "kernel", "oracle", "abs_diff", "tail_bound"], rows, [f"max_abs_diff: {_fmt(worst)}"]), out)
    return 0 if worst <= tol else 1


def _model(cfg: RunConfig):
    if cfg.params["model"] == "schur":
        return SchurModel(_g(cfg))
    return PlanePartitionModel(box=cfg.get("box"), steps=cfg.get("steps"))


def _cmd_lln(cfg: RunConfig, out) -> int:
    pp = cfg.params["model"] == "pp"
    f = _test_function(dict(cfg.params))
    m = Pattern(tuple(_sites(cfg.get("pattern", []), pp, "pattern")))
    scale = float(cfg.params["alpha"]) if not pp else _qparam(cfg).r
    res = run_lln_experiment(
        _model(cfg), f, m, scale, int(cfg.params["replicas"]), RngSeed(int(cfg.seed)), float(cfg.get("tol")), cfg.get("workers")
    )
    result = res.to_dict()
    _emit(cfg, _json(cfg, result), out)
    if cfg.output:
        p = Path(cfg.output)
        rows = [[i, v] for i, v in enumerate(res.sigma_samples)]
        p.with_name(p.stem + ".replicas.csv").write_text(_csv(cfg, ["replica", "sigma"], rows), encoding="utf-8", newline="\n")
    return 0 if res.i_quadrature_error <= max(float(cfg.get("tol")), 1e-9) * 10 else 1


def _cmd_converge(cfg: RunConfig, out) -> int:
    pp = cfg.params["model"] == "pp"
    m = Pattern(tuple(_sites(cfg.params["pattern"], pp, "pattern")))
    pos = _position(cfg.params["position"], pp, "position")
    table = convergence_study(_model(cfg), m, pos, [float(s) for s in cfg.params["scales"]])
    ratios = table.fit.get("ratios")
    rows = []
    for i, (s, e) in enumerate(table.rows()):
        ratio = ratios[i - 1] if ratios is not None and i > 0 else ""
        rows.append([s, e, ratio])
    extra = [f"slope: {_fmt(table.fit['slope'])}"]
    _emit(cfg, _csv(cfg, ["scale", "error", "ratio_to_previous"], rows, extra), out)
    return 0


def _cmd_decorrelate(cfg: RunConfig, out) -> int:
    pp = cfg.params["model"] == "pp"
    m = Pattern(tuple(_sites(cfg.params["pattern"], pp, "pattern")))
    pairs = [(_position(a, pp, "pairs"), _position(b, pp, "pairs")) for a, b in cfg.params["pairs"]]
    table = decorrelation_study(_model(cfg), m, pairs, float(cfg.params["scale"]))
    rows = [[s, c] for s, c in table.rows()]
    _emit(cfg, _csv(cfg, ["separation", "abs_cov"], rows, [f"slope: {_fmt(table.fit['slope'])}"]), out)
    return 0


_DISPATCH = {
    "kernel": _cmd_kernel,
    "sample": _cmd_sample,
    "oracle-check": _cmd_oracle,
    "lln": _cmd_lln,
    "converge": _cmd_converge,
    "decorrelate": _cmd_decorrelate,
}


def dispatch(cfg: RunConfig, out=None) -> int:
    """Run a validated configuration; returns the exit status."""
    try:
        return _DISPATCH[cfg.subcommand](cfg, out)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DpplnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _parse_list(text: str) -> list:
    try:
        val = yaml.safe_load(f"[{text}]")
    except yaml.YAMLError:
        raise argparse.ArgumentTypeError(f"cannot parse list {text!r}") from None
    return val


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dpplln", description="Pattern statistics of Schur and plane-partition point processes.")
    p.add_argument("--version", action="version", version=f"dpplln {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", type=Path, help="YAML configuration file")
        s.add_argument("--model", choices=MODELS)
        s.add_argument("--theta", type=float)
        s.add_argument("--alpha", type=float)
        s.add_argument("--q", type=float)
        s.add_argument("--r", type=float)
        s.add_argument("--seed", type=int)
        s.add_argument("--output", "-o")
        s.add_argument("--workers", type=int)
        if name == "sample":
            s.add_argument("--window", type=_parse_list, help="a,b (schur) or t0,t1,h0,h1 (pp)")
            s.add_argument("--samples", type=int)
        if name == "oracle-check":
            s.add_argument("--window", type=_parse_list)
            s.add_argument("--max-weight", dest="max_weight", type=int)
        if name == "kernel":
            s.add_argument("--sites", type=_parse_list)
        if name == "lln":
            s.add_argument("--replicas", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "subcommand")}
    try:
        cfg = parse_config(text, args.subcommand, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
