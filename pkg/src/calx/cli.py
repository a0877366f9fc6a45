"""The ``calx`` command line tool.

Four subcommands:

* ``energy-curve``    tabulate the optimal radial energy and its
                      derivative in the support radius,
* ``check``           build a calibration field and verify the axioms
                      on a grid,
* ``phase-diagram``   classify (beta, gamma) cells by which certificate
                      applies,
* ``describe``        dump the piecewise structure of a field as JSON.

Exit codes: 0 when the requested computation succeeds (for ``check``:
the field is certified), 1 when a construction is infeasible or a
verification fails, 2 on usage errors.  Options may also be supplied
through ``--config FILE`` (a flat JSON object keyed by option name);
explicit flags win over the file, the file wins over defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from calx.calibration_fields import (
    CalibParams1D,
    HypothesisViolation,
    build_field_1d,
    build_field_ball_harmonic,
    build_field_harmonic,
    build_field_indicator_const,
    build_field_indicator_two_piece,
    radial_shell_profile,
)
from calx.energy import (
    critical_radii,
    dE_dR,
    energy_radial_optimal,
    indicator_monotonicity_margin,
)
from calx.potentials import delta_robin
from calx.verifier import VerificationReport, VerifyConfig, verify_all


class _UsageError(Exception):
    pass


def _fmt(x):
    return "%.17g" % float(x)


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as handle:
            data = json.load(handle)
    except (OSError, ValueError) as exc:
        raise _UsageError("cannot read config {}: {}".format(path, exc))
    if not isinstance(data, dict):
        raise _UsageError("config file must contain a JSON object")
    return data


class _Options:
    """Flag / config-file / default resolution by option name."""

    def __init__(self, args, config):
        self.args = args
        self.config = config

    def get(self, name, default=None, cast=None):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.config.get(name, default)
        if value is None or cast is None:
            return value
        try:
            return cast(value)
        except (TypeError, ValueError):
            raise _UsageError("invalid value for {}: {!r}".format(name, value))

    def require(self, name, cast=None):
        value = self.get(name, cast=cast)
        if value is None:
            raise _UsageError("missing required option --{}".format(
                name.replace("_", "-")))
        return value


def _parse_grid(spec):
    """A float or 'start:stop:count' string into a 1-D array."""

    text = str(spec)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise _UsageError("grid spec must be start:stop:count, got {!r}".format(spec))
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise _UsageError("grid spec must be start:stop:count, got {!r}".format(spec))
        if count < 1 or stop < start:
            raise _UsageError("grid spec must be increasing with count >= 1")
        return np.linspace(start, stop, count)
    try:
        return np.array([float(text)])
    except ValueError:
        raise _UsageError("grid spec must be a number or start:stop:count, got {!r}".format(spec))


def _env_threads():
    raw = os.environ.get("CALX_THREADS", "")
    if not raw:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise _UsageError("CALX_THREADS must be an integer, got {!r}".format(raw))
    if threads < 1:
        raise _UsageError("CALX_THREADS must be at least 1")
    return threads


def _write_text(path, text):
    with open(path, "w") as handle:
        handle.write(text)


def _cmd_energy_curve(args, config):
    opt = _Options(args, config)
    n = opt.require("n", int)
    beta = opt.require("beta", float)
    gamma_ = opt.require("gamma", float)
    rmax = opt.get("rmax", 10.0, float)
    samples = opt.get("samples", 512, int)
    fmt = opt.get("format", "csv")
    out = opt.get("out")
    if rmax <= 1.0:
        raise _UsageError("--rmax must be greater than 1")
    if samples < 2:
        raise _UsageError("--samples must be at least 2")
    if fmt not in ("csv", "json"):
        raise _UsageError("--format must be csv or json")

    Rs = np.linspace(1.0, rmax, samples)
    Es = np.asarray(energy_radial_optimal(n, beta, gamma_, Rs))
    Ds = np.asarray(dE_dR(n, beta, gamma_, Rs))
    crit = critical_radii(n, beta, gamma_, rmax)
    best = int(np.argmin(Es))
    meta = {
        "n": n,
        "beta": beta,
        "gamma": gamma_,
        "rmax": rmax,
        "samples": samples,
        "critical_radii": crit,
        "energy_at_unit_radius": float(Es[0]),
        "grid_best_R": float(Rs[best]),
        "grid_best_energy": float(Es[best]),
    }

    if fmt == "json":
        doc = dict(meta)
        doc["columns"] = ["R", "E", "dE_dR"]
        doc["rows"] = [[float(r), float(e), float(d)]
                       for r, e, d in zip(Rs, Es, Ds)]
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if out:
            _write_text(out, text)
        else:
            sys.stdout.write(text)
        return 0

    lines = ["R,E,dE_dR"]
    for r, e, d in zip(Rs, Es, Ds):
        lines.append(",".join((_fmt(r), _fmt(e), _fmt(d))))
    text = "\n".join(lines) + "\n"
    if out:
        _write_text(out, text)
        _write_text(out + ".json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    return 0


def _verify_config_from(opt):
    kwargs = {"threads": _env_threads()}
    samples = opt.get("samples", cast=int)
    if samples is not None:
        kwargs["pos_res"] = samples
        kwargs["t_res"] = samples
        kwargs["pair_res"] = samples
    for name in ("tol_a", "tol_b", "tol_div", "tol_flux", "tol_graph"):
        value = opt.get(name, cast=float)
        if value is not None:
            kwargs[name] = value
    mode = opt.get("divergence_mode")
    if mode is not None:
        kwargs["divergence_mode"] = mode
    try:
        return VerifyConfig(**kwargs)
    except ValueError as exc:
        raise _UsageError(str(exc))


def _build_checked_field(kind, opt):
    """Returns (field, notes) or raises; infeasibility surfaces as
    HypothesisViolation from the builders."""

    notes = []
    if kind == "harmonic":
        beta = opt.require("beta", float)
        m = opt.require("m", float)
        M = opt.require("M", float)
        sup_grad = opt.get("sup_grad", cast=float)
        params = CalibParams1D.from_traces(m, M, beta, sup_grad=sup_grad)
        return build_field_1d(params), notes
    n = opt.require("n", int)
    beta = opt.require("beta", float)
    if kind == "indicator-const":
        return build_field_indicator_const(n, beta, opt.require("gamma", float)), notes
    if kind == "indicator-two-piece":
        return build_field_indicator_two_piece(n, beta, opt.require("gamma", float)), notes
    R = opt.require("R", float)
    gamma_ = opt.get("gamma", cast=float)
    if gamma_ is None:
        bracket = beta ** 2 - (n - 1) * beta / R
        gsq = bracket * delta_robin(n, beta, R) ** 2
        if gsq < 0.0:
            raise HypothesisViolation(
                "no nonnegative gamma satisfies the critical-radius identity "
                "at R = {:g} (beta^2 - (n-1) beta / R = {:g} < 0)".format(R, bracket))
        gamma_ = math.sqrt(gsq)
        notes.append("gamma = {} (from the critical-radius identity)".format(_fmt(gamma_)))
    threshold = n - 0.5
    if beta < threshold:
        notes.append(
            "note: beta = {:g} is below n - 1/2 = {:g}; the monotonicity "
            "hypothesis fails, grid results are empirical only".format(beta, threshold))
        field = build_field_ball_harmonic(n, beta, gamma_, R, enforce_beta=False)
        return field, notes
    return build_field_ball_harmonic(n, beta, gamma_, R), notes


def _cmd_check(args, config):
    opt = _Options(args, config)
    kind = args.kind
    fmt = opt.get("format", "text")
    if fmt not in ("text", "json"):
        raise _UsageError("--format must be text or json")
    vconfig = _verify_config_from(opt)

    try:
        field, notes = _build_checked_field(kind, opt)
    except HypothesisViolation as exc:
        report = VerificationReport.infeasible(str(exc), kind=kind)
        if fmt == "json":
            sys.stdout.write(report.to_json() + "\n")
        else:
            sys.stdout.write(report.summary_table() + "\n")
        return 1
    except ValueError as exc:
        raise _UsageError(str(exc))

    report = verify_all(field, config=vconfig)
    certified = report.passed and not any(n.startswith("note:") for n in notes)
    if fmt == "json":
        report.grid_meta["notes"] = notes
        report.grid_meta["certified"] = certified
        sys.stdout.write(report.to_json() + "\n")
    else:
        for note in notes:
            sys.stdout.write(note + "\n")
        sys.stdout.write(report.summary_table() + "\n")
        if report.passed and not certified:
            sys.stdout.write("grid checks passed but the construction is "
                             "outside the certified hypotheses\n")
    return 0 if certified else 1


def _classify_cell(n, beta, gamma_, rmax):
    if beta <= gamma_:
        return "indicator-by-beta-le-gamma"
    margin = indicator_monotonicity_margin(n, beta, gamma_, Rmax=rmax)
    if margin >= 0.0:
        return "indicator-by-monotonicity"
    if beta >= n - 0.5 and critical_radii(n, beta, gamma_, rmax):
        return "harmonic-certified"
    return "undetermined"


def _cmd_phase_diagram(args, config):
    opt = _Options(args, config)
    n = opt.require("n", int)
    betas = _parse_grid(opt.require("beta"))
    gammas = _parse_grid(opt.require("gamma"))
    rmax = opt.get("rmax", 10.0, float)
    out = opt.get("out")
    if rmax <= 1.0:
        raise _UsageError("--rmax must be greater than 1")
    if (betas <= 0.0).any():
        raise _UsageError("beta grid must be positive")
    if (gammas < 0.0).any():
        raise _UsageError("gamma grid must be nonnegative")

    lines = ["beta,gamma,regime"]
    for beta in betas:
        for gamma_ in gammas:
            regime = _classify_cell(n, float(beta), float(gamma_), rmax)
            lines.append(",".join((_fmt(beta), _fmt(gamma_), regime)))
    text = "\n".join(lines) + "\n"
    if out:
        _write_text(out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_describe(args, config):
    opt = _Options(args, config)
    kind = args.kind
    try:
        if kind == "1d":
            params = CalibParams1D.from_traces(
                opt.require("m", float), opt.require("M", float),
                opt.require("beta", float), sup_grad=opt.get("sup_grad", cast=float))
            field = build_field_1d(params)
        elif kind == "harmonic":
            n = opt.require("n", int)
            beta = opt.require("beta", float)
            R = opt.require("R", float)
            profile = radial_shell_profile(n, beta, R)
            field = build_field_harmonic(profile, profile.m, profile.M, beta)
        elif kind == "indicator-const":
            field = build_field_indicator_const(
                opt.require("n", int), opt.require("beta", float),
                opt.require("gamma", float))
        elif kind == "indicator-two-piece":
            field = build_field_indicator_two_piece(
                opt.require("n", int), opt.require("beta", float),
                opt.require("gamma", float))
        else:
            opt_gamma = opt.get("gamma", cast=float)
            n = opt.require("n", int)
            beta = opt.require("beta", float)
            R = opt.require("R", float)
            if opt_gamma is None:
                bracket = beta ** 2 - (n - 1) * beta / R
                gsq = bracket * delta_robin(n, beta, R) ** 2
                if gsq < 0.0:
                    raise HypothesisViolation(
                        "no nonnegative gamma satisfies the critical-radius "
                        "identity at R = {:g}".format(R))
                opt_gamma = math.sqrt(gsq)
            field = build_field_ball_harmonic(
                n, beta, opt_gamma, R,
                enforce_beta=(beta >= n - 0.5))
    except HypothesisViolation as exc:
        sys.stderr.write("infeasible: {}\n".format(exc))
        return 1
    except ValueError as exc:
        raise _UsageError(str(exc))
    sys.stdout.write(json.dumps(field.to_description(), indent=2, sort_keys=True) + "\n")
    return 0


def _add_field_params(sub):
    sub.add_argument("--n", type=int, help="space dimension")
    sub.add_argument("--beta", type=float, help="jump weight")
    sub.add_argument("--gamma", type=float, help="volume weight")
    sub.add_argument("--R", type=float, help="support radius")
    sub.add_argument("--m", type=float, help="lower boundary datum")
    sub.add_argument("--M", type=float, help="upper boundary datum")
    sub.add_argument("--sup-grad", dest="sup_grad", type=float,
                     help="gradient bound used by the jump-energy test")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="calx",
        description="calibration certificates and energies for thermal insulation")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON file with default option values")
    subs = parser.add_subparsers(dest="command", required=True)

    curve = subs.add_parser("energy-curve", parents=[shared],
                            help="tabulate the optimal radial energy over R")
    curve.add_argument("--n", type=int)
    curve.add_argument("--beta", type=float)
    curve.add_argument("--gamma", type=float)
    curve.add_argument("--rmax", type=float)
    curve.add_argument("--samples", type=int)
    curve.add_argument("--out")
    curve.add_argument("--format", choices=("csv", "json"))
    curve.set_defaults(handler=_cmd_energy_curve)

    check = subs.add_parser("check", parents=[shared], help="verify a calibration field on a grid")
    check.add_argument("kind", choices=("harmonic", "indicator-const",
                                        "indicator-two-piece", "ball-harmonic"))
    _add_field_params(check)
    check.add_argument("--samples", type=int,
                       help="grid resolution for every axis")
    check.add_argument("--tol-a", dest="tol_a", type=float)
    check.add_argument("--tol-b", dest="tol_b", type=float)
    check.add_argument("--tol-div", dest="tol_div", type=float)
    check.add_argument("--tol-flux", dest="tol_flux", type=float)
    check.add_argument("--tol-graph", dest="tol_graph", type=float)
    check.add_argument("--divergence-mode", dest="divergence_mode",
                       choices=("auto", "fd"))
    check.add_argument("--format", choices=("text", "json"))
    check.set_defaults(handler=_cmd_check)

    phase = subs.add_parser("phase-diagram", parents=[shared],
                            help="classify (beta, gamma) cells by certificate")
    phase.add_argument("--n", type=int)
    phase.add_argument("--beta", help="value or start:stop:count")
    phase.add_argument("--gamma", help="value or start:stop:count")
    phase.add_argument("--rmax", type=float)
    phase.add_argument("--out")
    phase.set_defaults(handler=_cmd_phase_diagram)

    desc = subs.add_parser("describe", parents=[shared], help="dump a field's piecewise structure")
    desc.add_argument("kind", choices=("1d", "harmonic", "indicator-const",
                                       "indicator-two-piece", "ball-harmonic"))
    _add_field_params(desc)
    desc.set_defaults(handler=_cmd_describe)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.handler(args, config)
    except _UsageError as exc:
        sys.stderr.write("error: {}\n".format(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
