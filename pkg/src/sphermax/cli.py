"""Command line front end.

Numeric flags that take grids accept "v", "v1,v2,..." or "min:max:n[:log]".
Profiles are JSON files (or inline JSON starting with "{").  CSV numbers are
written as the shortest decimal that round-trips (at most 17 significant
digits), so output is byte-identical across runs.

Exit codes: 0 ok, 2 domain error, 3 accuracy error, 4 divergence signal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bounds, kernel, pde, probe, special_ops, specfun, transform
from .errors import AccuracyError, DivergenceSignal, DomainError
from .kernel import Params
from .oscillatory import QuadSpec
from .profile import Profile

EXIT = {DomainError: 2, AccuracyError: 3, DivergenceSignal: 4}


# ---------------------------------------------------------------- parsing and output


def parse_grid(text: str) -> list[float]:
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
                raise ValueError
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            pts = np.geomspace(lo, hi, n) if len(parts) == 4 else np.linspace(lo, hi, n)
            return [float(v) for v in pts]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise DomainError(f"bad grid {text!r}; use v, v1,v2,... or min:max:n[:log]") from None


def load_profile(src: str | None) -> Profile:
    if src is None:
        raise DomainError("--profile is required")
    if src.lstrip().startswith("{"):
        return Profile.from_json(src)
    try:
        with open(src) as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read profile {src}: {exc}") from exc
    return Profile.from_json(text)


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else fmt(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_json(out, doc):
    out.write(json.dumps(_json_safe(doc), sort_keys=True) + "\n")


def _pmap(fn, items):
    """Order-preserving map, threaded up to SPHERMAX_THREADS workers."""
    items = list(items)
    try:
        n = int(os.environ.get("SPHERMAX_THREADS", "1"))
    except ValueError:
        n = 1
    if n <= 1 or len(items) < 2:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _params(a):
    return Params(a.alpha, a.beta)


def _quad(a):
    return QuadSpec(abs_tol=a.tol) if getattr(a, "tol", None) else QuadSpec()


# ---------------------------------------------------------------- subcommands


def cmd_kernel(a, out):
    p, q = _params(a), _quad(a)
    pts = [(t, x, z) for t in parse_grid(a.t) for x in parse_grid(a.x) for z in parse_grid(a.z)]
    what = a.what
    if what == "relations":
        rows = [(t, x, z, rid, lhs, rhs, ratio)
                for t, x, z in pts for rid, lhs, rhs, ratio in kernel.region_relations_report(t, x, z)]
        return write_csv(out, ["t", "x", "z", "relation", "lhs", "rhs", "ratio"], rows)
    if what == "region":
        rows = [(t, x, z, kernel.classify_region(t, x, z, a.band).value) for t, x, z in pts]
        return write_csv(out, ["t", "x", "z", "region"], rows)
    if what == "case":
        rows = [(t, x, z, *kernel.kernel_case_bound(p, t, x, z)) for t, x, z in pts]
        return write_csv(out, ["t", "x", "z", "case", "bound"], rows)
    fn = {
        "value": lambda t, x, z: kernel.kernel_value(p, t, x, z, q),
        "quadrature": lambda t, x, z: kernel.kernel_quadrature(p, t, x, z, q),
        "phi": lambda t, x, z: kernel.envelope_phi(p, t, x, z),
        "psi": lambda t, x, z: kernel.envelope_psi(p, t, x, z),
    }[what]
    vals = _pmap(lambda tr: fn(*tr), pts)
    write_csv(out, ["t", "x", "z", what], [(*tr, v) for tr, v in zip(pts, vals)])


def cmd_mean(a, out):
    p, q, f = _params(a), _quad(a), load_profile(a.profile)
    pts = [(t, x) for t in parse_grid(a.t) for x in parse_grid(a.x)]
    if a.method == "kernel":
        fn = lambda tx: transform.mean_via_kernel(p, f, *tx, q)  # noqa: E731
    elif a.method == "multiplier":
        fn = lambda tx: transform.mean_via_multiplier(p, f, *tx, q)  # noqa: E731
    else:
        if p.beta != 0:
            raise DomainError("the direct method needs beta = 0")
        fn = lambda tx: transform.mean_beta0_direct(p.alpha, f, *tx)  # noqa: E731
    vals = _pmap(fn, pts)
    write_csv(out, ["t", "x", "mean"], [(*tx, v) for tx, v in zip(pts, vals)])


def cmd_maximal(a, out):
    p, q, f = _params(a), _quad(a), load_profile(a.profile)
    xs = parse_grid(a.x)
    if a.truncated:
        fn = lambda x: transform.truncated_maximal(p, f, x, q, return_argmax=True)  # noqa: E731
    else:
        grid = transform.TGrid(a.tmin, a.tmax, n_log=a.n_log)
        fn = lambda x: transform.maximal_op(p, f, x, grid, q)  # noqa: E731
    vals = _pmap(fn, xs)
    write_csv(out, ["x", "value", "argmax_t"], [(x, v, t) for x, (v, t) in zip(xs, vals)])


def cmd_specop(a, out):
    spec = special_ops.OpSpec(a.kind, a.eta)
    doc = {"kind": spec.kind.value, "eta": spec.eta}
    if a.p is not None:
        if a.gamma is None:
            raise DomainError("--p needs --gamma")
        doc.update(p=a.p, gamma=a.gamma, bounded=special_ops.is_bounded_on(spec, a.p, a.gamma).value)
    if a.eval is not None:
        f = load_profile(a.profile)
        xs = parse_grid(a.eval)
        vals = _pmap(lambda x: special_ops.eval_special(spec, f, x), xs)
        doc["values"] = [{"x": x, "value": v} for x, v in zip(xs, vals)]
    if len(doc) == 2:
        raise DomainError("specop needs --p/--gamma and/or --eval")
    write_json(out, doc)


def cmd_bounds(a, out):
    p = _params(a)
    w = bounds.WeightedLp(a.p, a.delta)
    v = bounds.classify(p, w)
    doc = {
        "verdict": v.tag.value,
        "witness": v.witness,
        "sufficient_delta": bounds.sufficient_delta_interval(p, a.p).to_dict(),
        "necessary_ok": bounds.necessary_ok(p, w),
        "natural_weight_inv_p": bounds.natural_weight_p_range(p).to_dict(),
    }
    write_json(out, doc)


def cmd_diagram(a, out):
    curves, corners = bounds.figure1_curves(a.n)
    rows = [(name, u, b) for name, (u, b) in corners.items()]
    for name in sorted(curves):
        us, bs = curves[name].sample(a.samples)
        rows += [(name, u, b) for u, b in zip(us, bs)]
    if a.p is not None:
        thr, weak = bounds.radial_condition_1_8(a.n, a.p)
        rows.append(("radial_threshold", 1 / a.p, thr))
    write_csv(out, ["name", "inv_p", "beta"], rows)


def cmd_probe(a, out):
    if a.mode == "beta":
        num, closed = probe.beta_integral(a.gamma, a.A, a.B)
        return write_csv(out, ["gamma", "A", "B", "numeric", "closed"], [(a.gamma, a.A, a.B, num, closed)])
    if a.mode == "region":
        spec = probe.EpsRegionSpec(a.eps)
        return write_csv(out, ["t", "x", "z", "region"],
                         [(a.t, a.x, a.z, probe.in_eps_region(spec, a.t, a.x, a.z).value)])
    p = _params(a)
    if a.mode == "aux":
        f = load_profile(a.profile) if a.profile else _family(a).profile(p, N=a.N, delta=a.delta, p=a.p)
        try:
            v = probe.eval_aux(a.aux, p, f, a.t, a.x)
        except DivergenceSignal:
            v = math.inf
        return write_csv(out, ["kind", "t", "x", "value"], [(a.aux, a.t, a.x, v)])
    if a.p is None or a.delta is None:
        raise DomainError("a sweep needs --p and --delta")
    w = bounds.WeightedLp(a.p, a.delta)
    rows = probe.unboundedness_sweep(p, w, _family(a), parse_grid(a.scales), eps=a.eps)
    write_csv(out, ["scale", "f_norm", "Mstar_norm", "ratio"], rows)


def _family(a):
    if a.family is None:
        raise DomainError("--family is required")
    return probe.Family(a.family)


def _evo(a):
    return pde.EvolutionSpec(_params(a), "Wave_speed" if a.role == "wave" else "EPD_position",
                             load_profile(a.profile))


def cmd_evolve(a, out):
    spec, q = _evo(a), _quad(a)
    pts = [(t, x) for t in parse_grid(a.t) for x in parse_grid(a.x)]
    vals = _pmap(lambda tx: pde.evolve(spec, *tx, q), pts)
    write_csv(out, ["t", "x", "u"], [(*tx, v) for tx, v in zip(pts, vals)])


def cmd_converge(a, out):
    ts = sorted(parse_grid(a.tseq), reverse=True)
    rows = pde.convergence_report(_evo(a), (a.xmin, a.xmax), ts, _quad(a), n_x=a.nx)
    write_csv(out, ["t", "sup_error"], rows)


def cmd_specfun_selftest(a, out):
    """Max errors against scipy.special on a fixed grid, plus the gamma recurrence residual."""
    from scipy import special as sp

    nus = np.linspace(-0.9, 10, 12)
    xs = np.geomspace(1e-3, 50, 60)
    bj = 0.0
    for nu in nus:
        for x in xs:
            ref = sp.jv(nu, x)
            bj = max(bj, abs(specfun.bessel_j(nu, x) - ref) / max(abs(ref), 1e-300))
    gs = np.linspace(-4.9, 30.1, 351)
    gs = gs[np.abs(gs - np.round(gs)) > 1e-3]
    grec = max(abs(specfun.gamma(g + 1) - g * specfun.gamma(g)) / abs(specfun.gamma(g + 1)) for g in gs)
    gref = max(abs(specfun.gamma(g) - sp.gamma(g)) / abs(sp.gamma(g)) for g in gs)
    mult = 0.0
    for nu in (-0.4, 0.0, 0.5, 2.5):
        for s in np.geomspace(1e-3, 40, 40):
            ref = sp.gamma(nu + 1) * (2 / s) ** nu * sp.jv(nu, s)
            mult = max(mult, abs(specfun.multiplier_m(nu, s) - ref) / max(abs(ref), 1e-300))
    write_csv(out, ["quantity", "max_error"], [
        ("bessel_j_rel_vs_scipy", bj), ("gamma_rel_vs_scipy", gref),
        ("gamma_recurrence_rel", grec), ("multiplier_m_rel_vs_scipy", mult)])


# ---------------------------------------------------------------- dispatch

COMMANDS = {
    "kernel": (cmd_kernel, (kernel.kernel_value, kernel.kernel_quadrature, kernel.envelope_phi,
                            kernel.envelope_psi, kernel.kernel_case_bound, kernel.classify_region,
                            kernel.region_relations_report)),
    "mean": (cmd_mean, (transform.mean_via_kernel, transform.mean_via_multiplier, transform.mean_beta0_direct)),
    "maximal": (cmd_maximal, (transform.maximal_op, transform.truncated_maximal)),
    "specop": (cmd_specop, (special_ops.eval_special, special_ops.is_bounded_on)),
    "bounds": (cmd_bounds, (bounds.classify, bounds.sufficient_delta_interval, bounds.necessary_ok,
                            bounds.natural_weight_p_range)),
    "diagram": (cmd_diagram, (bounds.figure1_curves, bounds.radial_condition_1_8)),
    "probe": (cmd_probe, (probe.unboundedness_sweep, probe.eval_aux, probe.beta_integral, probe.in_eps_region)),
    "evolve": (cmd_evolve, (pde.evolve,)),
    "converge": (cmd_converge, (pde.convergence_report,)),
    "specfun-selftest": (cmd_specfun_selftest, (specfun.gamma, specfun.bessel_j, specfun.multiplier_m)),
}


def _ab(sp, beta_default=None):
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=beta_default is None, default=beta_default)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sphermax", description="Generalized spherical means toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("kernel", help="kernel values, envelopes, regions")
    _ab(s)
    s.add_argument("--t", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--z", required=True)
    s.add_argument("--what", default="value", choices=["value", "quadrature", "phi", "psi", "case", "region",
                                                       "relations"])
    s.add_argument("--band", type=float, default=0.0)
    s.add_argument("--tol", type=float)

    s = sub.add_parser("mean", help="M_t f(x)")
    _ab(s)
    s.add_argument("--t", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--method", default="kernel", choices=["kernel", "multiplier", "direct"])
    s.add_argument("--tol", type=float)

    s = sub.add_parser("maximal", help="grid maximal function")
    _ab(s)
    s.add_argument("--x", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--tmin", type=float, default=1e-3)
    s.add_argument("--tmax", type=float, default=100.0)
    s.add_argument("--n-log", type=int, default=64)
    s.add_argument("--truncated", action="store_true", help="sup over 0 < t < x/2 only")
    s.add_argument("--tol", type=float)

    s = sub.add_parser("specop", help="special averaging operators")
    s.add_argument("--kind", required=True, choices=[k.value for k in special_ops.OpKind])
    s.add_argument("--eta", type=float)
    s.add_argument("--p", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--eval")
    s.add_argument("--profile")

    s = sub.add_parser("bounds", help="weighted L^p verdict as JSON")
    _ab(s)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)

    s = sub.add_parser("diagram", help="boundary curves in the (1/p, beta) plane")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, default=11)
    s.add_argument("--p", type=float)

    s = sub.add_parser("probe", help="counterexample sweeps and helpers")
    s.add_argument("--mode", default="sweep", choices=["sweep", "aux", "beta", "region"])
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--p", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--family", choices=[f.value for f in probe.FamilyId])
    s.add_argument("--scales", default="10,30,100,300")
    s.add_argument("--N", type=float)
    s.add_argument("--eps", type=float)
    s.add_argument("--aux", choices=[k.value for k in probe.AuxKind], default="U1")
    s.add_argument("--profile")
    s.add_argument("--t", type=float)
    s.add_argument("--x", type=float)
    s.add_argument("--z", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--A", type=float)
    s.add_argument("--B", type=float)

    for name, grids in (("evolve", True), ("converge", False)):
        s = sub.add_parser(name, help="radial Cauchy problem" if grids else "sup-errors as t -> 0")
        _ab(s)
        s.add_argument("--role", default="epd", choices=["epd", "wave"])
        s.add_argument("--profile", required=True)
        s.add_argument("--tol", type=float)
        if grids:
            s.add_argument("--t", required=True)
            s.add_argument("--x", required=True)
        else:
            s.add_argument("--tseq", default="0.125,0.0625,0.03125,0.015625")
            s.add_argument("--xmin", type=float, required=True)
            s.add_argument("--xmax", type=float, required=True)
            s.add_argument("--nx", type=int, default=41)

    sub.add_parser("specfun-selftest", help="special-function error summary")
    return ap


def _check_probe_args(a):
    need = {"sweep": ("alpha", "beta", "family"), "aux": ("alpha", "beta", "t", "x"),
            "beta": ("gamma", "A", "B"), "region": ("eps", "t", "x", "z")}[a.mode]
    missing = [n for n in need if getattr(a, n) is None]
    if missing:
        raise DomainError(f"probe --mode {a.mode} needs " + ", ".join("--" + n for n in missing))


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        if args.cmd == "probe":
            _check_probe_args(args)
        COMMANDS[args.cmd][0](args, buf)
    except (DomainError, AccuracyError, DivergenceSignal) as exc:
        code = next(c for cls, c in EXIT.items() if isinstance(exc, cls))
        print(f"sphermax {args.cmd}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    out.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
