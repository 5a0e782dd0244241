"""Command-line front end.

Subcommands read JSON inputs, write a JSON report (sorted keys, floats
rounded to 12 significant digits so repeated runs are byte-identical) and
optionally CSV fields or series into ``--fields-dir``.

Exit status: 0 on success, 1 on input errors, 2 when a verification fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .ap_core import TrigPolynomial, spectrum
from .as_functions import ASFunction
from .bochner_fejer import apply_operator, certified_error, choose_kernel_for_net, damping_report
from .errors import ApholoError, GlueMismatch, NotHolomorphic, StageError, VerificationFailed
from .fields import GridField
from .strip_holo import BoundaryPair, QuadraturePlan, poisson_extend_strip

SIG_DIGITS = 12


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors (exit 1), not argparse's usual 2."""

    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    conv.__name__ = kind.__name__
    return conv


def _clean(obj):
    """JSON-ready copy: rounded floats, complex as [re, im], non-finite as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIG_DIGITS}g}") + 0.0
    return obj


def _drop_timings(obj):
    # wall-clock timings would make repeated runs differ
    if isinstance(obj, dict):
        return {k: _drop_timings(v) for k, v in obj.items() if k != "timings"}
    if isinstance(obj, (list, tuple)):
        return [_drop_timings(v) for v in obj]
    return obj


def dump_json(obj, path=None):
    text = json.dumps(_clean(_drop_timings(obj)), sort_keys=True, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_json(path, what="input"):
    if path is None:
        raise InputError(f"--{what} is required")
    if not os.path.exists(path):
        raise InputError(f"{what} file not found: {path}")
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _parse(kind, data, path):
    try:
        return kind.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid {kind.__name__}: {exc!r}") from exc


def _fields_dir(args):
    if args.fields_dir:
        os.makedirs(args.fields_dir, exist_ok=True)
    return args.fields_dir


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.{SIG_DIGITS + 5}g}" if isinstance(v, float) else v for v in row])


def _series(path, t, values):
    d = values.shape[-1]
    header = ["t"] + [c for k in range(d) for c in (f"re_{k + 1}", f"im_{k + 1}")]
    rows = [[float(ti)] + [float(x) for v in vi for x in (v.real, v.imag)] for ti, vi in zip(t, values)]
    _write_rows(path, header, rows)


def _glue_config(args):
    from .dbar_glue import GlueConfig

    if args.config:
        data = load_json(args.config, "config")
        try:
            return GlueConfig.from_dict(data)
        except (TypeError, ValueError) as exc:
            raise InputError(f"{args.config}: {exc}") from exc
    return GlueConfig()


def _echo(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# subcommands
def cmd_spectrum(args):
    p = _parse(TrigPolynomial, load_json(args.input), args.input)
    rows = [(f.value, v.norm(), [str(c) for c in f.coords]) for f, v in spectrum(p)]
    rows.sort()
    if args.out and args.out.endswith(".json"):
        dump_json({"command": "spectrum", "config": _echo(args),
                   "spectrum": [{"lambda": a, "norm": b, "coords": c} for a, b, c in rows]}, args.out)
    else:
        path = args.out or "-"
        text = "lambda,norm\n" + "".join(f"{a:.{SIG_DIGITS}g},{b:.{SIG_DIGITS}g}\n" for a, b, _ in rows)
        if path == "-":
            sys.stdout.write(text)
        else:
            with open(path, "w") as fh:
                fh.write(text)
    return 0


def cmd_kernel(args):
    p = _parse(TrigPolynomial, load_json(args.input), args.input)
    eps = _need_eps(args)
    spec = choose_kernel_for_net([p], eps)
    q = apply_operator(spec, p)
    bound = certified_error(spec, p)
    t = np.arange(0.0, args.window + args.step / 2, args.step)
    diff = p(t) - q(t)
    grid = float(np.abs(diff).max(axis=-1).max()) if p.norm_tag == "sup" else float(np.linalg.norm(diff, axis=-1).max())
    fd = _fields_dir(args)
    if fd:
        stride = max(1, int(round(args.series_step / args.step)))
        _series(os.path.join(fd, "f.csv"), t[::stride], p(t[::stride]))
        _series(os.path.join(fd, "Tf.csv"), t[::stride], q(t[::stride]))
    report = {"command": "kernel", "config": _echo(args), "kernel": spec.to_dict(),
              "certified_error": bound, "grid_sup_error": grid, "pass": bool(grid <= bound + 1e-12 and bound <= eps),
              "damping": [{"freq": [str(c) for c in e.frequency.coords], "factor": float(e.factor),
                            "on_grid": e.on_grid, "in_range": e.in_range}
                          for e in damping_report(spec, p)],
              "smoothed": q.to_dict()}
    dump_json(report, args.out)
    return 0 if report["pass"] else 2


def cmd_extend(args):
    data = load_json(args.input)
    try:
        bottom = TrigPolynomial.from_dict(data["bottom"])
        top = TrigPolynomial.from_dict(data["top"]) if data.get("top") else TrigPolynomial.zero(bottom.basis, bottom.dim)
        pts = data.get("points")
        if pts is None:
            n = int(data.get("random_points", 100))
            rng = np.random.default_rng(args.seed)
            z = rng.uniform(-10, 10, n) + 1j * rng.uniform(0.05, math.pi - 0.05, n)
        else:
            z = np.array([complex(x, y) for x, y in pts])
        method = data.get("method", "auto")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.input}: {exc!r}") from exc
    bp = BoundaryPair(bottom, top)
    plan = QuadraturePlan(tol=args.tol)
    vals = np.array([np.asarray(poisson_extend_strip(bp, zi, plan, method=method)) for zi in z])
    check = None
    if method == "quadrature" and bp.closed_form:
        exact = np.array([np.asarray(poisson_extend_strip(bp, zi, plan, method="closed")) for zi in z])
        check = float(np.abs(vals - exact).max())
    fd = _fields_dir(args)
    if fd:
        GridField(z, vals, 0.0, region="strip", kind="scattered").to_csv(os.path.join(fd, "extension.csv"))
    report = {"command": "extend", "config": _echo(args), "method": method,
              "points": [[float(p.real), float(p.imag)] for p in z],
              "values": [[complex(v) for v in row] for row in np.asarray(vals).reshape(len(z), -1)],
              "closed_form_gap": check}
    dump_json(report, args.out)
    return 0


def _sap_input(data, path):
    from .sap_circle import APProfile, build_sap, sap_from_as_function

    try:
        if "as_function" in data:
            f = ASFunction.from_dict(data["as_function"])
            sap = sap_from_as_function(f, s=float(data.get("s", 0.5)), exact=bool(data.get("exact", True)))
        else:
            profiles = [APProfile.from_dict(p) for p in data["profiles"]]
            bg = data.get("background", {"constant": [[0.0, 0.0]] * profiles[0].dim})
            if "constant" in bg:
                c = np.array([complex(a, b) for a, b in bg["constant"]])
                background = lambda th, c=c: np.broadcast_to(c, np.shape(th) + c.shape)  # noqa: E731
            else:
                poly = TrigPolynomial.from_dict(bg)
                background = poly
            sap = build_sap(data["singular"], profiles, background, data.get("blend"))
        cands = {}
        for p in data.get("candidates", []):
            c = APProfile.from_dict(p)
            cands[round(c.z0, 12)] = c
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc!r}") from exc
    return sap, cands


def cmd_sap_verify(args):
    data = load_json(args.input)
    sap, cands = _sap_input(data, args.input)
    eps = _need_eps(args)
    from .sap_circle import verify_sap

    points = data.get("z0", [p.z0 for p in sap.profiles])
    points = points if isinstance(points, list) else [points]
    results, ok = [], True
    for z0 in points:
        try:
            _, rep = verify_sap(sap, float(z0), eps, candidate=cands.get(round(float(z0), 12)))
        except VerificationFailed as exc:
            rep, ok = exc.report, False
        results.append(rep.to_dict())
    dump_json({"command": "sap-verify", "config": _echo(args), "pass": ok, "points": results}, args.out)
    return 0 if ok else 2


def _need_eps(args):
    if args.epsilon is None or not args.epsilon > 0:
        raise InputError("--epsilon must be a positive number")
    return float(args.epsilon)


def cmd_pipeline(args):
    from .dbar_glue import approximate

    f = _parse(ASFunction, load_json(args.input), args.input)
    eps = _need_eps(args)
    cfg = _glue_config(args)
    singular = None
    if args.singular:
        s = load_json(args.singular, "singular")
        singular = s.get("singular", s) if isinstance(s, dict) else s
        if not isinstance(singular, list):
            raise InputError(f"{args.singular}: expected a list of angles")
    F, field, cert, rep = approximate(f, eps, cfg, singular)
    fd = _fields_dir(args)
    if fd:
        field.to_csv(os.path.join(fd, "F_eps.csv"))
        GridField(field.nodes, f(field.nodes), field.step, region="disk", kind="polar",
                  axes=field.axes).to_csv(os.path.join(fd, "f.csv"))
    out = rep.to_dict()
    ok = bool(out["dbar_residual"].get("pass", True))
    dump_json({"command": "pipeline", "config": dict(_echo(args), glue=cfg.to_dict()),
               "input": f.to_dict(), "report": out, "pass": ok}, args.out)
    return 0 if ok else 2


def cmd_tensor(args):
    from .polydisk import TensorFunction, tensor_approximate, tensor_sup_norm

    F = _parse(TensorFunction, load_json(args.input), args.input)
    eps = _need_eps(args)
    cfg = _glue_config(args)
    G, rep = tensor_approximate(F, eps, cfg, n_grid=args.torus_grid)
    sup = tensor_sup_norm(F, args.torus_grid)
    ok = rep.measured <= rep.bound
    dump_json({"command": "tensor", "config": dict(_echo(args), glue=cfg.to_dict()),
               "report": rep.to_dict(), "sup_norm": {"grid_max": sup.grid_max, "product_bound": sup.product_bound},
               "pass": ok}, args.out)
    return 0 if ok else 2


def build_parser():
    p = _Parser(prog="apholo", description="Almost periodic holomorphic approximation toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps=True):
        sp.add_argument("--input", help="input JSON file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--fields-dir", help="directory for CSV fields and series")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized fixtures")
        if eps:
            sp.add_argument("--epsilon", type=_positive(float), help="target accuracy")

    sp = sub.add_parser("spectrum", help="list frequencies and coefficient norms")
    common(sp, eps=False)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("kernel", help="choose a Bochner-Fejer kernel and smooth")
    common(sp)
    sp.add_argument("--window", type=_positive(float), default=1000.0)
    sp.add_argument("--step", type=_positive(float), default=0.01)
    sp.add_argument("--series-step", type=_positive(float), default=0.1)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("extend", help="holomorphic extension of strip boundary data")
    common(sp, eps=False)
    sp.add_argument("--tol", type=_positive(float), default=1e-8)
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("sap-verify", help="check semi-almost periodicity at singular points")
    common(sp)
    sp.set_defaults(func=cmd_sap_verify)

    sp = sub.add_parser("pipeline", help="run the gluing pipeline on the disk")
    common(sp)
    sp.add_argument("--config", help="GlueConfig JSON")
    sp.add_argument("--singular", help="JSON list of singular angles")
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("tensor", help="factor-wise approximation on the polydisk")
    common(sp)
    sp.add_argument("--config", help="GlueConfig JSON")
    sp.add_argument("--torus-grid", type=_positive(int), default=256)
    sp.set_defaults(func=cmd_tensor)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except (VerificationFailed, GlueMismatch, NotHolomorphic) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"stage failed: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, (VerificationFailed, GlueMismatch, NotHolomorphic)) else 1
    except ApholoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
