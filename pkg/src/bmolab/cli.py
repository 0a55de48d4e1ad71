"""Command-line entry points composing the modules into reproducible
experiments.  Every subcommand writes a JSON report (and CSV curves where
meaningful) embedding the fully resolved configuration and the tool
version; identical configurations produce byte-identical reports.

Exit codes: 0 success, 1 unknown command, 2 precondition or configuration
error, 3 numeric domain error.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import compactness as cp
from . import kernels as kn
from . import operators as op
from . import oscillation as osc
from . import weights as wt
from .approximation import (
    ThresholdScanConfig,
    adjacency_jump,
    approximation_error,
    build_family,
    derivative_decay,
    mollify,
    project_simple,
    select_thresholds,
)
from .errors import EvalDomainError, ParseError, PreconditionError
from .expr import catalog, parse_function
from .funcspace import Cube, midpoint_nodes
from .report import tool_stamp, write_csv, write_json

COMMANDS = ("oscillation", "approx", "kernel-verify", "commutator", "weights", "compactness")

_CATALOG_NAMES = ("prod_sin", "smoothed_log", "log_abs", "bump", "sign", "zero", "one")


def parse_number(text: str) -> float:
    """Numeric literal with pi/e symbols: '2pi', '-pi/2', 'e', '1e-3'."""
    s = text.strip()
    s = re.sub(r"(?<=[0-9.)])\s*pi\b", "*pi", s)
    s = re.sub(r"\bpi\b", f"({math.pi!r})", s)
    s = re.sub(r"(?<![0-9.eE_a-zA-Z])e(?![0-9a-zA-Z_.])", f"({math.e!r})", s)
    expr = parse_function(s)
    return float(expr.evaluate(np.zeros((1, 1)))[0])


def parse_number_list(text: str):
    return [parse_number(part) for part in text.split(",") if part.strip()]


def parse_cube(text: str, dim_default: int = 1) -> Cube:
    """Cube literal '[lo,hi]' with an optional '^n' suffix."""
    s = text.strip()
    m = re.fullmatch(r"\[([^\]]+)\](?:\^(\d+))?", s)
    if m is None:
        raise PreconditionError(f"bad cube literal {text!r}; expected [lo,hi] or [lo,hi]^n")
    parts = m.group(1).split(",")
    if len(parts) != 2:
        raise PreconditionError(f"bad cube literal {text!r}: need two endpoints")
    lo, hi = parse_number(parts[0]), parse_number(parts[1])
    n = int(m.group(2)) if m.group(2) else dim_default
    if not hi > lo:
        raise PreconditionError(f"bad cube literal {text!r}: hi must exceed lo")
    c = (lo + hi) / 2.0
    return Cube((c,) * n, (hi - lo) / 2.0)


def parse_func(text: str, dim: int):
    if text in _CATALOG_NAMES:
        return catalog(text, dim)
    return parse_function(text, dim=dim)


def parse_grid(text: str):
    """Evaluation grid literal 'lo:hi:count'."""
    parts = text.split(":")
    if len(parts) != 3:
        raise PreconditionError(f"bad grid literal {text!r}; expected lo:hi:count")
    lo, hi = parse_number(parts[0]), parse_number(parts[1])
    count = int(parts[2])
    if count < 1 or not hi > lo:
        raise PreconditionError(f"bad grid literal {text!r}")
    return np.linspace(lo, hi, count)


def load_config(path: str) -> dict:
    """Flat 'key = value' configuration file; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"config line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(args, argv, config):
    for key, value in config.items():
        if not hasattr(args, key):
            raise PreconditionError(f"unknown config field {key!r}")
        flag = "--" + key.replace("_", "-")
        explicit = any(a == flag or a.startswith(flag + "=") for a in argv)
        if not explicit:  # the command line wins over the config file
            setattr(args, key, value)
    return args


# ---------------------------------------------------------------------------
# Subcommands


def _embed(args) -> dict:
    """Resolved configuration for the report; the output location does not
    affect the computation and is excluded so identical runs are identical."""
    return {k: v for k, v in vars(args).items() if k not in ("out", "config")}


def _cmd_oscillation(args):
    dim = int(args.n)
    f = parse_func(args.f, dim)
    res = int(args.resolution) if args.resolution else None
    outdir = Path(args.out)
    config = _embed(args)
    if args.mode == "translation":
        cube = parse_cube(args.cube, dim)
        radii = parse_number_list(args.radii)
        dirs = osc.ScanConfig().directions(dim)
        profile = osc.translation_profile(f, cube, dirs, radii, res)
        profiles = {"translation": profile}
    elif args.mode in ("small", "large"):
        scales = parse_number_list(args.scales)
        bound = parse_number(args.centers_bound)
        step = parse_number(args.center_step)
        axis = np.arange(-bound, bound + step / 2, step)
        centers = [(c,) * dim for c in axis] if dim == 1 else [
            tuple(v) for v in osc.ScanConfig(center_bound=bound, center_step=step).centers(dim)
        ]
        fn = osc.small_scale_profile if args.mode == "small" else osc.large_scale_profile
        profile = fn(f, scales, centers, res)
        profiles = {args.mode: profile}
    elif args.mode == "annulus":
        radii = parse_number_list(args.radii)
        profile = osc.annulus_profile(f, radii, resolution=res)
        profiles = {"annulus": profile}
    elif args.mode == "classify":
        result = osc.classify(f, tolerance=parse_number(args.tolerance))
        write_json(outdir / "report.json",
                   {**tool_stamp(config), "classify": result.to_dict()})
        for name, profile in (("small_scale", result.small),
                              ("translation", result.translation),
                              ("large_scale", result.large)):
            write_csv(outdir / f"{name}.csv",
                      ["parameter", "value", "argmax_center", "argmax_side", "cube_count"],
                      profile.rows())
        return 0
    else:
        raise PreconditionError(f"unknown oscillation mode {args.mode!r}")
    payload = {**tool_stamp(config)}
    for name, profile in profiles.items():
        payload[name] = profile.to_dict()
        write_csv(outdir / f"{name}.csv",
                  ["parameter", "value", "argmax_center", "argmax_side", "cube_count"],
                  profile.rows())
    write_json(outdir / "report.json", payload)
    return 0


def _cmd_approx(args):
    dim = int(args.n)
    f = parse_func(args.f, dim)
    eps = parse_number(args.eps)
    kmax = int(args.kmax)
    res = int(args.resolution) if args.resolution else None
    scan = ThresholdScanConfig(region_bound=parse_number(args.region_bound))
    schedule = select_thresholds(f, eps, scan, kmax)
    approx = project_simple(f, build_family(schedule, dim), res)
    jump, pair = adjacency_jump(approx)
    err = approximation_error(f, approx, resolution=res)
    h = mollify(approx)
    # sup |g - h| over a dense probe grid inside the coverage
    R = min(approx.coverage_half_side * 0.9, 64.0)
    probes = np.linspace(-R, R, 401).reshape(-1, 1) if dim == 1 else midpoint_nodes(
        Cube((0.0,) * dim, R), 21
    )
    gh = float(np.max(np.abs(approx.evaluate(probes) - h.evaluate(probes))))
    config = _embed(args)
    payload = {
        **tool_stamp(config),
        "schedule": schedule.to_dict(),
        "cube_count": approx.cube_count(),
        "adjacency_jump": jump,
        "approximation_error": err,
        "error_over_eps": err / eps,
        "g_minus_h_sup": gh,
        "mollifier_mass": h.mollifier_mass(),
    }
    if args.decay_radii:
        radii = parse_number_list(args.decay_radii)
        for order in (1, 2):
            alpha = (order,) + (0,) * (dim - 1)
            payload[f"decay_order{order}"] = derivative_decay(h, alpha, radii).to_dict()
    outdir = Path(args.out)
    write_json(outdir / "report.json", payload)
    write_json(outdir / "family.json", approx.to_dict())
    return 0


def _cmd_kernel_verify(args):
    n = int(args.n)
    kernel = kn.reference_kernel(n) if args.kernel == "reference" else kn.size_saturating_kernel(n)
    plan = kn.SamplePlan(seed=int(args.seed), count=int(args.samples))
    report = kn.verify_bounds(kernel, plan)
    payload = {**tool_stamp(_embed(args), seed=int(args.seed)), "bounds": report.to_dict()}
    etas = parse_number_list(args.etas)
    if etas:
        truncated = {}
        for eta in etas:
            truncated[f"eta={eta:g}"] = kn.verify_bounds(kn.truncate(kernel, eta), plan).to_dict()
        payload["truncated"] = truncated
    As = parse_number_list(args.As)
    if As:
        payload["split_constants"] = [kn.diagnostic_split_constants(n, A) for A in As]
    write_json(Path(args.out) / "report.json", payload)
    return 0


def _cmd_commutator(args):
    n = int(args.n)
    kernel = kn.reference_kernel(n) if args.kernel == "reference" else kn.size_saturating_kernel(n)
    eta = parse_number(args.eta) if args.eta else None
    if eta:
        kernel = kn.truncate(kernel, eta)
    b = parse_func(args.b, n)
    f = op.SupportedFunction(parse_func(args.f, n), parse_cube(args.f_support, n))
    g = op.SupportedFunction(parse_func(args.g, n), parse_cube(args.g_support, n))
    xs = parse_grid(args.xs)
    res = int(args.resolution) if args.resolution else None
    out = op.commutator(int(args.i), b, kernel, f, g, xs, res,
                        check_consistency=True, threads=int(args.threads))
    outdir = Path(args.out)
    write_csv(outdir / "values.csv", ["x", "value"],
              [(x[0] if n == 1 else tuple(x), v) for x, v in zip(out.grid, out.values)])
    write_json(outdir / "report.json",
               {**tool_stamp(_embed(args)), "sidecar": out.to_sidecar()})
    return 0


def _cmd_weights(args):
    n = int(args.n)
    vw = wt.VectorWeight(parse_func(args.w1, n), parse_func(args.w2, n),
                         parse_number(args.p1), parse_number(args.p2))
    bound = parse_number(args.cubes_bound)
    res = int(args.resolution) if args.resolution else None
    cubes = []
    for side in (0.5, 1.0, 2.0, 4.0):
        for c in np.linspace(-bound + side / 2, bound - side / 2, 9):
            cubes.append(Cube((c,) * n, side / 2.0))
    value, argmax = wt.vector_ap_constant(vw, cubes, res)
    write_json(Path(args.out) / "report.json", {
        **tool_stamp(_embed(args)),
        "p1": vw.p1,
        "p2": vw.p2,
        "p": vw.p,
        "constant": value,
        "argmax_center": list(argmax.center),
        "argmax_side": argmax.side,
        "scan_size": len(cubes),
    })
    return 0


def _default_pairs(n):
    from .expr import bump_at

    spots = [(-5.0, 3.0, 5.0, 3.0), (-6.0, 2.0, 6.0, 2.0), (5.0, 3.0, -6.0, 2.5),
             (-4.0, 2.0, 7.0, 3.0), (-7.0, 3.5, 5.0, 2.0), (6.0, 2.0, -5.0, 2.0),
             (-8.0, 3.0, 4.0, 2.5), (4.0, 2.5, -7.0, 2.5)]
    pairs = []
    for fc, fw, gc, gw in spots:
        f = op.SupportedFunction(bump_at((fc,) + (0.0,) * (n - 1), fw, n),
                                 Cube((fc,) + (0.0,) * (n - 1), fw))
        g = op.SupportedFunction(bump_at((gc,) + (0.0,) * (n - 1), gw, n),
                                 Cube((gc,) + (0.0,) * (n - 1), gw))
        pairs.append((f, g))
    return pairs


def _cmd_compactness(args):
    n = int(args.n)
    region = Cube((0.0,) * n, parse_number(args.region))
    w = parse_func(args.w, n)
    p = parse_number(args.p)
    A_list = parse_number_list(args.A_list)
    t_list = parse_number_list(args.t_list)
    res = int(args.resolution) if args.resolution else None
    if args.experiment == "zero":
        members = [cp.FamilyMember("zero", lambda pts: np.zeros(np.atleast_2d(pts).shape[0]))]
    elif args.experiment == "far-translates":
        from .expr import bump_at

        members = [
            cp.FamilyMember.from_function(bump_at((c,) + (0.0,) * (n - 1), 1.0, n))
            for c in (0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0)
        ]
    elif args.experiment == "commutator8":
        eta = parse_number(args.eta)
        kernel = kn.truncate(kn.reference_kernel(n), eta)
        b = parse_func(args.b, n)
        vw = wt.VectorWeight(parse_func(args.w1, n), parse_func(args.w2, n),
                             parse_number(args.p1), parse_number(args.p2))
        pairs = [cp.normalize_pair(f, g, vw) for f, g in _default_pairs(n)]
        xs = midpoint_nodes(region, res or 401)
        members = cp.commutator_family(b, kernel, pairs, vw, xs,
                                       threads=int(args.threads))
    else:
        raise PreconditionError(f"unknown compactness experiment {args.experiment!r}")
    report = cp.fk_check(members, w, p, A_list, t_list, region=region, resolution=res)
    outdir = Path(args.out)
    write_json(outdir / "report.json",
               {**tool_stamp(_embed(args)), "fk": report.to_dict()})
    write_csv(outdir / "tail.csv", ["A", "sup_tail_norm"],
              sorted(report.tail_norms.items()))
    write_csv(outdir / "modulus.csv", ["t", "sup_shift_norm"],
              sorted(report.modulus.items(), key=lambda kv: -abs(kv[0])))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    parser = argparse.ArgumentParser(prog="bmolab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="flat key = value config file")
        p.add_argument("--n", default="1", help="ambient dimension")
        p.add_argument("--out", default="bmolab-out", help="report directory")
        p.add_argument("--resolution", default=None, help="quadrature points per axis")
        p.add_argument("--threads", default="1", help="worker threads (results identical)")

    p = sub.add_parser("oscillation", help="oscillation profiles and the classifier")
    common(p)
    p.add_argument("--f", required=True, help="expression or catalog name")
    p.add_argument("--mode", default="classify",
                   choices=["small", "large", "translation", "annulus", "classify"])
    p.add_argument("--cube", default="[-pi/2,pi/2]")
    p.add_argument("--radii", default="2pi,4pi,6pi")
    p.add_argument("--scales", default="1,0.25,0.0625,0.015625")
    p.add_argument("--centers-bound", dest="centers_bound", default="50")
    p.add_argument("--center-step", dest="center_step", default="1")
    p.add_argument("--tolerance", default="0.01")

    p = sub.add_parser("approx", help="the constructive approximation pipeline")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--eps", default="0.5")
    p.add_argument("--kmax", default="6")
    p.add_argument("--region-bound", dest="region_bound", default="16384")
    p.add_argument("--decay-radii", dest="decay_radii", default="")

    p = sub.add_parser("kernel-verify", help="kernel bound verification")
    common(p)
    p.add_argument("--kernel", default="reference", choices=["reference", "odd"])
    p.add_argument("--seed", default="20200705")
    p.add_argument("--samples", default="4000")
    p.add_argument("--etas", default="1,0.5,0.25")
    p.add_argument("--As", dest="As", default="8,16,32")

    p = sub.add_parser("commutator", help="bilinear commutator on a grid")
    common(p)
    p.add_argument("--b", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--f-support", dest="f_support", default="[-1,1]")
    p.add_argument("--g-support", dest="g_support", default="[-1,1]")
    p.add_argument("--kernel", default="reference", choices=["reference", "odd"])
    p.add_argument("--eta", default="0.25")
    p.add_argument("--i", default="1", choices=["1", "2"])
    p.add_argument("--xs", default="-5:5:41")

    p = sub.add_parser("weights", help="vector weight constant")
    common(p)
    p.add_argument("--w1", required=True)
    p.add_argument("--w2", required=True)
    p.add_argument("--p1", default="2")
    p.add_argument("--p2", default="2")
    p.add_argument("--cubes-bound", dest="cubes_bound", default="10")

    p = sub.add_parser("compactness", help="Frechet-Kolmogorov harness")
    common(p)
    p.add_argument("--experiment", default="commutator8",
                   choices=["zero", "far-translates", "commutator8"])
    p.add_argument("--b", default="smoothed_log")
    p.add_argument("--eta", default="0.25")
    p.add_argument("--w", default="one")
    p.add_argument("--w1", default="one")
    p.add_argument("--w2", default="one")
    p.add_argument("--p", default="2")
    p.add_argument("--p1", default="4")
    p.add_argument("--p2", default="4")
    p.add_argument("--region", default="30")
    p.add_argument("--A-list", dest="A_list", default="5,10,20")
    p.add_argument("--t-list", dest="t_list", default="0.04,0.02,0.01")

    return parser


_DISPATCH = {
    "oscillation": _cmd_oscillation,
    "approx": _cmd_approx,
    "kernel-verify": _cmd_kernel_verify,
    "commutator": _cmd_commutator,
    "weights": _cmd_weights,
    "compactness": _cmd_compactness,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        print(f"bmolab: unknown command {argv[0]!r}; choose from {', '.join(COMMANDS)}",
              file=sys.stderr)
        return 1
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            _apply_config(args, argv, load_config(args.config))
        return _DISPATCH[args.command](args)
    except ParseError as exc:
        print(f"bmolab: expression error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"bmolab: {exc}", file=sys.stderr)
        return 2
    except EvalDomainError as exc:
        print(f"bmolab: numeric domain error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"bmolab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
