"""Command-line front end.

Subcommands ``certify``, ``sweep``, ``simulate`` and ``oracle`` read an INI
configuration::

    [state]
    kind = squeezed          ; coherent | fock | squeezed | mixture | data
    r = 0.5
    alpha0 = 0.2

    [settings]
    uniform = 3              ; or: etas = 0.5, 1.0
    eta_c = 0.8

    [uncertainty]            ; optional
    delta = 0.01             ; one value or one per setting
    mode = model             ; measured (default) | model

    [tests]
    run = linear, moments, oracle

    [sweep]
    param = alpha0
    start = 0
    stop = 3
    step = 0.05

    [simulation]
    trials = 10000000
    seed = 1234
    z = 3

Exit codes: 0 classical-compatible, 2 nonclassical, 3 inconclusive,
1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import certify as cert
from .simulate import EmpiricalRecord, TrialPlan, run_experiment, witness_error
from .states import EfficiencySettings, StateModel, probability_vector

EXIT_CODES = {cert.CLASSICAL: 0, cert.NONCLASSICAL: 2, cert.INCONCLUSIVE: 3}
SWEEP_PARAMS = {"alpha0": "amplitude", "r": "squeeze", "amplitude_sq": "amplitude_sq",
                "eta_c": "eta_c"}
SWEEP_KINDS = {"alpha0": ("squeezed",), "r": ("squeezed",), "amplitude_sq": ("coherent",),
               "eta_c": ("coherent", "fock", "squeezed", "mixture", "data")}
TESTS = ("linear", "moments", "oracle")


class ConfigError(Exception):
    """Configuration problem, anchored to a file line when possible."""


@dataclass
class RunConfig:
    path: str
    state: StateModel | None
    data: np.ndarray | None
    data_trials: int | None
    settings: EfficiencySettings
    delta: tuple | None = None
    mode: str | None = None
    tests: tuple = ("linear", "oracle")
    sweep: dict | None = None
    trials: int | None = None
    seed: int | None = None
    z: float = 3.0
    lines: dict = field(default_factory=dict)


def _key_lines(text):
    """Map ``(section, key)`` to 1-based line numbers."""
    out = {}
    section = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip().lower()
            out[(section, None)] = no
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section:
            out[(section, m.group(1).strip().lower())] = no
    return out


def _floats(value):
    return tuple(float(v) for v in re.split(r"[,\s]+", value.strip()) if v)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    lines = _key_lines(text)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        msg = str(exc).splitlines()[0]
        raise ConfigError(f"{path}:{lineno or 1}: {msg}") from None

    def fail(section, key, msg):
        no = lines.get((section, key), lines.get((section, None), 1))
        where = f"{section}.{key}" if key else section
        raise ConfigError(f"{path}:{no}: {where}: {msg}")

    def get(section, key, conv=str, default=None, required=False):
        if not parser.has_option(section, key):
            if required:
                fail(section, None, f"missing key {key!r}")
            return default
        raw = parser.get(section, key)
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            fail(section, key, f"cannot parse {raw!r}: {exc}")

    if not parser.has_section("state"):
        raise ConfigError(f"{path}:1: missing [state] section")
    if not parser.has_section("settings"):
        raise ConfigError(f"{path}:1: missing [settings] section")

    kind = get("state", "kind", str.lower, required=True)
    state = data = data_trials = None
    try:
        if kind == "coherent":
            state = StateModel.coherent(get("state", "amplitude_sq", float, required=True))
        elif kind == "fock":
            state = StateModel.fock(get("state", "n", int, required=True))
        elif kind == "squeezed":
            state = StateModel.squeezed(get("state", "r", float, required=True),
                                        get("state", "alpha0", float, required=True),
                                        get("state", "quadrature", str, "phase"))
        elif kind == "mixture":
            state = StateModel.mixture(get("state", "weights", _floats, required=True),
                                       get("state", "amplitudes_sq", _floats, required=True))
        elif kind == "data":
            data = np.asarray(get("state", "p", _floats, required=True))
            if np.any((data < 0) | (data > 1)):
                fail("state", "p", "probabilities must lie in [0, 1]")
            data_trials = get("state", "trials", int)
        else:
            fail("state", "kind", f"unknown state kind {kind!r}")
    except ValueError as exc:
        fail("state", None, str(exc))

    try:
        eta_c = get("settings", "eta_c", float, 1.0)
        if parser.has_option("settings", "uniform") and parser.has_option("settings", "etas"):
            fail("settings", "etas", "give either 'uniform' or 'etas', not both")
        if parser.has_option("settings", "uniform"):
            n = get("settings", "uniform", int)
            if n < 1:
                fail("settings", "uniform", "need at least one setting")
            settings = EfficiencySettings.uniform(n, eta_c)
        else:
            etas = get("settings", "etas", _floats, required=True)
            settings = EfficiencySettings(etas, eta_c)
    except ValueError as exc:
        key = "etas" if parser.has_option("settings", "etas") else "uniform"
        fail("settings", key, str(exc))
    if data is not None and len(data) != settings.N:
        fail("state", "p", f"expected {settings.N} probabilities, got {len(data)}")

    cfg = RunConfig(path, state, data, data_trials, settings, lines=lines)
    if parser.has_section("uncertainty"):
        delta = get("uncertainty", "delta", _floats, required=True)
        if len(delta) == 1:
            delta = delta * settings.N
        if len(delta) != settings.N:
            fail("uncertainty", "delta", f"need 1 or {settings.N} values")
        try:
            cert.UncertaintyDomain(delta).validate(settings)
        except ValueError as exc:
            fail("uncertainty", "delta", str(exc))
        cfg.delta = delta
        cfg.mode = get("uncertainty", "mode", str.lower)
        if cfg.mode not in (None, "model", "measured"):
            fail("uncertainty", "mode", "must be 'model' or 'measured'")
        if cfg.mode == "model" and state is None:
            fail("uncertainty", "mode", "model mode needs a state model")
    if parser.has_section("tests"):
        run = [t.strip().lower() for t in get("tests", "run", str, "all").split(",") if t.strip()]
        if run == ["all"]:
            run = list(TESTS)
        bad = [t for t in run if t not in TESTS]
        if bad:
            fail("tests", "run", f"unknown tests {bad}")
        cfg.tests = tuple(run)
    if parser.has_section("sweep"):
        param = get("sweep", "param", str, required=True)
        if param not in SWEEP_PARAMS:
            fail("sweep", "param", f"must be one of {sorted(SWEEP_PARAMS)}")
        if kind not in SWEEP_KINDS[param]:
            fail("sweep", "param", f"{param!r} is not a parameter of a {kind} state")
        start = get("sweep", "start", float, required=True)
        stop = get("sweep", "stop", float, required=True)
        step = get("sweep", "step", float, required=True)
        cfg.sweep = {"param": param, "start": start, "stop": stop, "step": step}
    if parser.has_section("simulation"):
        cfg.trials = get("simulation", "trials", int)
        cfg.seed = get("simulation", "seed", int)
        cfg.z = get("simulation", "z", float, 3.0)
    return cfg


# --------------------------------------------------------------------------
# pipelines


def _epsilon_for(direction, p, trials):
    counts = np.rint(np.asarray(p) * trials).astype(np.int64)
    return witness_error(direction, EmpiricalRecord(counts, int(trials)))


def run_certify(cfg: RunConfig, grid=2001, z=None):
    z = cfg.z if z is None else z
    t0 = time.perf_counter()
    source = cfg.state if cfg.state is not None else cfg.data
    P = cfg.data if cfg.data is not None else probability_vector(cfg.state, cfg.settings)
    if cfg.delta is not None:
        report = cert.robust_violation(source, cfg.settings, cert.UncertaintyDomain(cfg.delta),
                                       mode=cfg.mode)
        extra = cert.certify(P, cfg.settings, tuple(t for t in cfg.tests if t != "linear"),
                             grid=grid) if {"oracle", "moments"} & set(cfg.tests) else None
        if extra is not None:
            report.oracle, report.moments = extra.oracle, extra.moments
            if report.oracle is not None:
                report.oracle_agrees = cert.oracle_agreement(extra.V, report.oracle)
    else:
        report = cert.certify(P, cfg.settings, cfg.tests, grid=grid)
    if cfg.data_trials:
        report.epsilon = _epsilon_for(report.best_direction, P, cfg.data_trials)
    report.verdict = cert.decide(report.V, report.epsilon, z, report.converged)
    report.timings["total"] = time.perf_counter() - t0
    return report


def run_simulate(cfg: RunConfig, trials, seed, z=None):
    z = cfg.z if z is None else z
    if cfg.state is None:
        raise ConfigError(f"{cfg.path}:{cfg.lines.get(('state', 'kind'), 1)}: state.kind: "
                          "simulation needs a state model")
    t0 = time.perf_counter()
    settings = cfg.settings
    delta = None
    mode = "measured"
    if cfg.delta is not None:
        rob = cert.robust_violation(cfg.state, settings, cert.UncertaintyDomain(cfg.delta),
                                    mode=cfg.mode)
        delta, mode = rob.best_delta, rob.mode
        settings = settings.shifted(delta)
    record = run_experiment(TrialPlan(trials, seed, settings, cfg.state))
    p_hat = record.p_hat
    if cfg.delta is not None:
        direction = rob.best_direction
        V = float(direction.violation(p_hat))
        family = rob.family
    else:
        mv = cert.max_violation(p_hat, settings)
        direction, V, family = mv.direction, mv.V, mv.family
    eps = witness_error(direction, record)
    report = cert.CertificationReport(cert.decide(V, eps, z), V, direction, delta, epsilon=eps,
                                      family=family, mode=mode)
    report.timings["total"] = time.perf_counter() - t0
    out = report.to_dict()
    out["p_hat"] = [float(v) for v in p_hat]
    out["trials"] = int(trials)
    out["seed"] = int(seed)
    out["margin"] = z * eps
    return report, out


def sweep_values(start, stop, step):
    """Sweep grid with ``floor((stop - start) / step) + 1`` points."""
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise ValueError("sweep bounds must be finite")
    if step <= 0 or stop < start:
        raise ValueError("empty sweep range")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _point_config(cfg: RunConfig, param, value):
    attr = SWEEP_PARAMS[param]
    if attr == "eta_c":
        settings = EfficiencySettings(cfg.settings.etas, float(value), cfg.settings.delta_bound)
        return RunConfig(**{**cfg.__dict__, "settings": settings})
    if cfg.state is None:
        raise ValueError("sweeping a state parameter needs a state model")
    return RunConfig(**{**cfg.__dict__, "state": cfg.state.replace(**{attr: float(value)})})


def run_sweep(cfg: RunConfig, trials=None, seed=None, z=None, threads=None):
    sw = cfg.sweep
    values = sweep_values(sw["start"], sw["stop"], sw["step"])
    trials = trials if trials is not None else cfg.trials
    seed = seed if seed is not None else cfg.seed

    def one(item):
        k, v = item
        pc = _point_config(cfg, sw["param"], v)
        pc.tests = ("linear",)
        if trials:
            rep, _ = run_simulate(pc, trials, (seed or 0) + k, z)
        else:
            rep = run_certify(pc, z=z)
        return v, rep.V, rep.epsilon, rep.verdict

    threads = threads or int(os.environ.get("NONCLASS_THREADS", "1") or 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(one, enumerate(values)))
    return [one(item) for item in enumerate(values)]


# --------------------------------------------------------------------------
# output


def _fmt(v):
    if v is None:
        return "nan"
    return "%.17g" % v


def format_sweep(rows):
    lines = ["param,V,epsilon,verdict"]
    lines += [f"{_fmt(p)},{_fmt(V)},{_fmt(e)},{verdict}" for p, V, e, verdict in rows]
    return "\n".join(lines) + "\n"


def format_report(d, fmt):
    if fmt == "json":
        return json.dumps(d, indent=2, sort_keys=True) + "\n"
    width = max(len(k) for k in d)
    out = []
    for k, v in d.items():
        if isinstance(v, float):
            v = "%.10g" % v
        elif isinstance(v, (list, tuple)):
            v = ", ".join("%.10g" % x if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, dict):
            v = ", ".join(f"{a}={'%.6g' % b if isinstance(b, float) else b}" for a, b in v.items())
        out.append(f"{k.ljust(width)}  {v}")
    return "\n".join(out) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    p = argparse.ArgumentParser(prog="nonclass", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("certify", "certify a single configuration"),
                           ("sweep", "sweep one parameter and emit a CSV table"),
                           ("simulate", "simulate click statistics and certify them"),
                           ("oracle", "run the convex-hull LP oracle")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True, help="INI configuration file")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", choices=("table", "json", "json-like"), default="table")
        sp.add_argument("--grid", type=int, default=2001, help="oracle grid size")
        sp.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        sp.add_argument("--trials", type=int, help="trials per setting")
        sp.add_argument("--z", type=float, help="significance multiplier")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    fmt = "json" if args.format in ("json", "json-like") else "table"
    try:
        if args.grid < 2:
            raise ConfigError("--grid must be at least 2")
        if args.z is not None and args.z <= 0:
            raise ConfigError("--z must be positive")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = load_config(args.config)
        if args.command == "certify":
            report = run_certify(cfg, args.grid, args.z)
            _emit(format_report(report.to_dict(), fmt), args.out)
            return EXIT_CODES[report.verdict]
        if args.command == "oracle":
            P = cfg.data if cfg.data is not None else probability_vector(cfg.state, cfg.settings)
            res = cert.hull_membership_oracle(P, cfg.settings, args.grid)
            d = {"feasible": res.feasible, "residual": res.residual, "grid": args.grid,
                 "status": res.status, "support": [float(t) for t in res.ts],
                 "weights": [float(w) for w in res.weights]}
            _emit(format_report(d, fmt), args.out)
            if res.inconclusive:
                return 3
            return 0 if res.feasible else 2
        if args.command == "simulate":
            trials = args.trials if args.trials is not None else cfg.trials
            seed = args.seed if args.seed is not None else cfg.seed
            if trials is None or trials < 1:
                raise ConfigError(f"{cfg.path}: simulation needs a positive trial count "
                                  "(--trials or [simulation] trials)")
            if seed is None:
                raise ConfigError(f"{cfg.path}: simulation needs a seed "
                                  "(--seed or [simulation] seed)")
            report, d = run_simulate(cfg, trials, seed, args.z)
            _emit(format_report(d, fmt), args.out)
            return EXIT_CODES[report.verdict]
        if args.command == "sweep":
            if cfg.sweep is None:
                raise ConfigError(f"{cfg.path}: sweep needs a [sweep] section")
            try:
                rows = run_sweep(cfg, args.trials, args.seed, args.z)
            except ValueError as exc:
                no = cfg.lines.get(("sweep", None), 1)
                raise ConfigError(f"{cfg.path}:{no}: sweep: {exc}") from None
            _emit(format_sweep(rows), args.out)
            return 0
    except ConfigError as exc:
        print(f"nonclass: error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
