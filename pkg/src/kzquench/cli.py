"""Command-line front end: sweeps, correlators, validation, schedule rendering.

A run is configured by a versioned JSON document; any field can be overridden
on the command line with repeated ``--set dotted.key=value`` flags.  Output
CSVs carry a header row plus a comment line with the configuration hash, and
all numeric formatting uses shortest round-trip decimals, so reruns with the
same configuration are byte-identical.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import closedform, correlators, edoracle, evolver, protocol
from .evolver import NumericalFailure, SolverOptions

CONFIG_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


DEFAULT_CONFIG = {
    "version": CONFIG_VERSION,
    "protocol": {"kind": "round_trip", "g_rt": 0.0, "R": 1.0,
                 "g_i": protocol.DEFAULT_G_INITIAL, "g_f": protocol.DEFAULT_G_FINAL},
    "solver": {"rel_tol": 1e-8, "abs_tol": 1e-10},
    "quadrature": {"order": 16, "n_support": 12},
    "sweep": {"tau_q": {"start": 10.0, "stop": 60.0, "step": 0.25}},
    "correlator": {"tau_q": [32.0], "r_max_factor": 2.0, "r_step": 1.0},
    "validate": {"N": 8, "tau_q": [1.0, 2.0]},
    "output": {"prefix": "kzquench_out"},
}


def _merge(base, override):
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path=None, overrides=()):
    cfg = DEFAULT_CONFIG
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        if user.get("version", CONFIG_VERSION) != CONFIG_VERSION:
            raise ConfigError("unsupported config version %r" % user.get("version"))
        cfg = _merge(cfg, user)
    cfg = json.loads(json.dumps(cfg))  # deep copy
    for item in overrides:
        if "=" not in item:
            raise ConfigError("--set expects dotted.key=value, got %r" % item)
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = value
    return cfg


def config_hash(cfg):
    """Hash of the physics configuration (output destinations excluded)."""
    body = {k: v for k, v in cfg.items() if k != "output"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]


def _fmt(x):
    if x is None:
        return "nan"
    x = float(x)
    return repr(x)


def _write_csv(path, header, rows, cfg):
    with open(path, "w") as fh:
        fh.write("# config_hash=%s\n" % config_hash(cfg))
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def build_schedule(pcfg, tau_q):
    kind = pcfg.get("kind", "round_trip")
    if kind == "round_trip":
        return protocol.round_trip(pcfg.get("g_rt", 0.0), tau_q, pcfg.get("R", 1.0),
                                   pcfg.get("g_i", protocol.DEFAULT_G_INITIAL),
                                   pcfg.get("g_f", protocol.DEFAULT_G_FINAL))
    if kind == "reversed_round_trip":
        return protocol.reversed_round_trip(pcfg.get("g_rt", 1.5), tau_q, pcfg.get("R", 1.0))
    if kind == "quarter_turn":
        return protocol.quarter_turn(pcfg.get("g_qt", 1.5), tau_q, pcfg.get("R", 1.0),
                                     pcfg.get("jy_initial", protocol.DEFAULT_JY_INITIAL))
    if kind == "one_way":
        return protocol.one_way(pcfg.get("g_i", 10.0), pcfg.get("g_f", 0.0), tau_q)
    raise ConfigError("unknown protocol kind %r" % kind)


def _tau_list(scfg):
    entry = scfg.get("tau_q")
    if isinstance(entry, dict) and "values" in entry:
        entry = entry["values"]
    if isinstance(entry, dict):
        try:
            vals = np.arange(entry["start"], entry["stop"] + 0.5 * entry["step"], entry["step"])
        except KeyError as exc:
            raise ConfigError("sweep.tau_q dict needs start/stop/step or values") from exc
        return [float(v) for v in vals]
    if isinstance(entry, list):
        return [float(v) for v in entry]
    raise ConfigError("sweep.tau_q must be a list or {start, stop, step}")


def closed_form_density(pcfg, tau_q):
    """(n_closed, n0, f, M, delta, T_Q) for the configured protocol at tau_q."""
    kind = pcfg.get("kind", "round_trip")
    R = pcfg.get("R", 1.0)
    nan = float("nan")
    try:
        if kind in ("round_trip", "reversed_round_trip"):
            g_rt = pcfg.get("g_rt", 0.0)
            if g_rt == 1.0:
                return (nan, 1.0 / (2.0 * math.pi * math.sqrt(2.0 * tau_q)),
                        nan, nan, nan, math.inf)
            pred = closedform.density_prediction_roundtrip(tau_q, R, g_rt)
            return pred.n, pred.n0, pred.f, pred.M, pred.delta, pred.T_Q
        if kind == "quarter_turn":
            g_qt = pcfg.get("g_qt", 1.5)
            n_quad = closedform.density_quarter_turn_quadrature(tau_q, R, g_qt)
            pred = closedform.density_quarter_turn(tau_q, R, g_qt)
            if isinstance(pred, closedform.AiryDensity):
                return n_quad, nan, nan, nan, nan, pred.T_Q
            return n_quad, pred.n0, pred.f, pred.M, pred.delta, pred.T_Q
        if kind == "one_way":
            n0 = 1.0 / (2.0 * math.pi * math.sqrt(2.0 * tau_q))
            return n0, n0, 1.0, 0.0, 0.0, nan
    except closedform.OutOfRegimeError:
        return (nan,) * 6
    raise ConfigError("unknown protocol kind %r" % kind)


def _sweep_point(args):
    cfg, tau = args
    sch = build_schedule(cfg["protocol"], tau)
    opts = SolverOptions(**cfg["solver"])
    sp = evolver.evolve_spectrum_quadrature(sch, opts, **cfg["quadrature"])
    n_num = evolver.defect_density(sp)
    n_cf, n0, f, M, delta, T_Q = closed_form_density(cfg["protocol"], tau)
    return [tau, n_num, n_cf, n0, f, M, delta, T_Q]


def worker_count():
    try:
        return max(1, int(os.environ.get("KZQUENCH_WORKERS", "1")))
    except ValueError:
        return 1


def cmd_sweep(cfg):
    taus = _tau_list(cfg["sweep"])
    if not taus:
        raise ConfigError("sweep.tau_q resolved to an empty list")
    jobs = [(cfg, t) for t in taus]
    workers = worker_count()
    if workers > 1:
        import multiprocessing

        with multiprocessing.Pool(workers) as pool:
            rows = pool.map(_sweep_point, jobs)
    else:
        rows = [_sweep_point(j) for j in jobs]
    prefix = cfg["output"]["prefix"]
    csv_path = prefix + "_sweep.csv"
    _write_csv(csv_path,
               ["tau_Q", "n_numeric", "n_closed_form", "n0", "f", "M", "delta",
                "T_Q_predicted"],
               rows, cfg)
    sidecar = {"config": cfg, "config_hash": config_hash(cfg),
               "package_version": _version(), "rows": len(rows)}
    with open(prefix + "_sweep.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
    return [csv_path, prefix + "_sweep.json"]


def cmd_correlator(cfg):
    ccfg = cfg["correlator"]
    pcfg = cfg["protocol"]
    kind = pcfg.get("kind", "round_trip")
    prefix = cfg["output"]["prefix"]
    opts = SolverOptions(**cfg["solver"])
    files = []
    for tau in [float(t) for t in ccfg.get("tau_q", [32.0])]:
        sch = build_schedule(pcfg, tau)
        if kind == "round_trip":
            ls = correlators.length_scales_roundtrip(tau, pcfg.get("g_f", 10.0))
        elif kind == "reversed_round_trip":
            ls = correlators.primed_length_scales(tau, pcfg.get("g_rt", 10.0))
        else:
            raise ConfigError("correlator closed forms exist for the round-trip "
                              "and reversed protocols only")
        r_max = ccfg.get("r_max_factor", 2.0) * max(ls.l_beta)
        r = np.arange(0.0, r_max + 1e-9, ccfg.get("r_step", 1.0))
        sp = evolver.evolve_spectrum_quadrature(sch, opts, max_r=float(r[-1]),
                                                **cfg["quadrature"])
        fc = correlators.fermionic_correlators_numeric(sp, r)
        c_quad = correlators.czz(fc)
        n0 = 1.0 / (2.0 * math.pi * math.sqrt(2.0 * tau))
        if kind == "round_trip":
            alpha = correlators.alpha_closed(r, tau)
            beta = correlators.beta_closed(r, tau, pcfg.get("g_f", 10.0))
            dephased = correlators.dephased_czz(r, tau)
        else:
            alpha, beta = correlators.primed_correlators_closed(r, tau, pcfg.get("g_rt", 10.0))
            dephased = correlators.dephased_ckk(r, tau)
        c_closed = np.abs(beta) ** 2 - alpha ** 2
        rows = [[ri, n0 * ri, cq, cc, -a * a, abs(b) ** 2, dp]
                for ri, cq, cc, a, b, dp in zip(r, c_quad, c_closed, alpha, beta, dephased)]
        tag = ("%g" % tau).replace(".", "p")
        path = "%s_correlator_tau%s.csv" % (prefix, tag)
        _write_csv(path,
                   ["r", "n0_r_scaled", "Czz_quadrature", "Czz_closed",
                    "minus_alpha_sq", "beta_sq", "dephased"],
                   rows, cfg)
        files.append(path)
        lrows = []
        for m in range(5):
            lrows.append([m + 1, ls.l_alpha[m] if m < 2 else float("nan"),
                          ls.l_beta[m], ls.xi_hat])
        lpath = "%s_lengths_tau%s.csv" % (prefix, tag)
        _write_csv(lpath, ["m", "l_alpha", "l_beta", "xi_hat"], lrows, cfg)
        files.append(lpath)
    return files


def cmd_validate(cfg):
    """ED-oracle comparison plus invariant checks; machine-readable report."""
    vcfg = cfg["validate"]
    N = int(vcfg.get("N", 8))
    checks = []

    def record(name, passed, detail, tolerance):
        checks.append({"name": name, "passed": bool(passed), "detail": detail,
                       "tolerance": tolerance})

    opts = SolverOptions()
    for tau in [float(t) for t in vcfg.get("tau_q", [1.0, 2.0])]:
        sch = protocol.round_trip(0.0, tau, 1.0)
        st = edoracle.evolve_exact(sch, N, opts)
        n_ed = edoracle.measure_defects(st, "paramagnetic")
        n_bdg = evolver.fermion_density(evolver.evolve_spectrum(sch, N, opts))
        record("ed_vs_bdg_roundtrip_tau%g" % tau, abs(n_ed - n_bdg) < 1e-6,
               {"n_ed": n_ed, "n_bdg": n_bdg, "diff": abs(n_ed - n_bdg)}, 1e-6)
        par = edoracle.parity_expectation(st)
        record("parity_tau%g" % tau, abs(par - 1.0) < 1e-9, {"parity": par}, 1e-9)
        schr = protocol.reversed_round_trip(1.5, tau, 1.0)
        str_ = edoracle.evolve_exact(schr, N, opts)
        k_ed = edoracle.measure_defects(str_, "ferromagnetic")
        k_bdg = evolver.defect_density(evolver.evolve_spectrum(schr, N, opts))
        record("ed_vs_bdg_reversed_tau%g" % tau, abs(k_ed - k_bdg) < 1e-6,
               {"kinks_ed": k_ed, "kinks_bdg": k_bdg, "diff": abs(k_ed - k_bdg)}, 1e-6)
    sch = protocol.round_trip(0.0, 10.0, 1.0)
    sp = evolver.evolve_spectrum(sch, 64, opts)
    record("norm_drift", sp.norm_drift <= 10.0 * opts.rel_tol,
           {"norm_drift": sp.norm_drift}, 10.0 * opts.rel_tol)
    terms = closedform.interference_terms_roundtrip(sp.q, 10.0, 1.0)
    lo = (terms.A - terms.B) ** 2 - 1e-3
    hi = (terms.A + terms.B) ** 2 + 1e-3
    ok = bool(np.all(sp.p >= lo) and np.all(sp.p <= hi))
    record("bounds_sample", ok, {"max_violation": float(max(np.max(lo - sp.p), np.max(sp.p - hi)))}, 1e-3)
    report = {"checks": checks, "all_passed": all(c["passed"] for c in checks),
              "config_hash": config_hash(cfg)}
    prefix = cfg["output"]["prefix"]
    with open(prefix + "_validate.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    return report


def cmd_protocol_render(cfg, stream=sys.stdout):
    taus = _tau_list(cfg.get("sweep", {"tau_q": [32.0]}))
    sch = build_schedule(cfg["protocol"], taus[0])
    stream.write("schedule kind=%s  span=[%g, %g]\n" % (sch.kind, sch.t_start, sch.t_end))
    stream.write("breakpoints (t, g, J_x, J_y):\n")
    times = [sch.segments[0].t_start] + [s.t_end for s in sch.segments]
    for t in times:
        g, jx, jy = sch.params_at(t)
        stream.write("  %s %s %s %s\n" % (_fmt(t), _fmt(g), _fmt(jx), _fmt(jy)))
    stream.write("crossings (t, q_c, label):\n")
    for c in sch.crossings:
        stream.write("  %s %s %s\n" % (_fmt(c.t), _fmt(c.q_c), c.label))
    return sch


def _version():
    from . import __version__

    return __version__


def main(argv=None):
    parser = argparse.ArgumentParser(prog="kzquench",
                                     description="Quench interferometry runs")
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field (dotted path, JSON value)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sweep", "correlator", "validate", "protocol-render"):
        sub.add_parser(name)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "sweep":
            for f in cmd_sweep(cfg):
                print(f)
        elif args.command == "correlator":
            for f in cmd_correlator(cfg):
                print(f)
        elif args.command == "validate":
            report = cmd_validate(cfg)
            print(json.dumps(report, indent=2, sort_keys=True))
            if not report["all_passed"]:
                return EXIT_VALIDATION
        elif args.command == "protocol-render":
            cmd_protocol_render(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
