"""Command-line entry point: ``bispectra <command> [options]``.

Every command prints one report (JSON by default, or CSV) and exits with
0 when all asserted checks pass, 1 when a check fails and 2 on usage
errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import family, grassmann, moments, second_kind, toda, virasoro
from .reports import CheckReport, jsonable, rat
from .schur import partitions_up_to

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("BISPECTRA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"BISPECTRA_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("BISPECTRA_THREADS must be at least 1")
    return n


def _parse_rational_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(",") if part.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse rational list {text!r}") from None


def _config(args) -> family.FamilyConfig:
    try:
        if args.q_coeffs:
            return family.FamilyConfig(args.d, _parse_rational_list(args.q_coeffs))
        return family.FamilyConfig.gould_hopper(args.d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _positive(name: str, value: int, allow_zero: bool = True) -> int:
    if value < 0 or (value == 0 and not allow_zero):
        raise UsageError(f"{name} must be {'non-negative' if allow_zero else 'positive'}")
    return value


def _fmt(c) -> str:
    """CSV cell for a rational: ``p`` or ``p/q``."""
    return str(Fraction(c))


# ---------------------------------------------------------------------------
# commands; each returns (passed, data, reports, table)
# table = (header, rows) for CSV output


def cmd_polys(args, cfg):
    n_max = _positive("--max-n", args.max_n)
    rows = []
    for n in range(n_max + 1):
        P = family.generate_polynomial(cfg, n)
        rows.append({"n": n, "coeffs": [rat(c) for c in P.dense()]})
    table = (["n", "coeffs"], [[r["n"], " ".join(_fmt(Fraction(int(a), int(b))) for a, b in r["coeffs"])] for r in rows])
    return True, rows, [], table


def cmd_moments(args, cfg):
    count = _positive("--count", args.count, allow_zero=False)
    seq = moments.moment_sequence(cfg, count - 1)
    pearson = moments.pearson_operator(cfg)
    data = {
        "moments": [rat(m) for m in seq.moments],
        "pearson": [{"x": a, "d": b, "coeff": rat(c)} for (a, b), c in sorted(pearson.terms.items())],
    }
    header = [f"mu_{k}" for k in range(count)]
    return True, data, [], (header, [[_fmt(m) for m in seq.moments]])


def _report_table(reports):
    return (["check", "passed", "checked", "failures"], [[r.name, r.passed, r.checked, len(r.failures)] for r in reports])


def cmd_verify(args, cfg):
    if args.what == "bochner":
        reports = [family.verify_bispectrality(cfg, _positive("--max-n", args.max_n))]
        L = family.bochner_operator(cfg)
        data = {"bochner_operator": [{"x": a, "d": b, "coeff": rat(c)} for (a, b), c in sorted(L.terms.items())]}
    else:
        N = _positive("--max-n", args.max_n)
        reports = [
            moments.verify_duality(cfg, N),
            moments.verify_d_orthogonality(cfg, N),
            moments.verify_weight_recurrence(cfg, N),
        ]
        data = {}
    return all(reports), data, reports, _report_table(reports)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"cannot parse number {text!r}") from None


def _residual_job(payload):
    d, s, x, offset, nodes, tol, rel = payload
    cfg = family.FamilyConfig.gould_hopper(d)
    quad = second_kind.ContourSpec(d, offset=offset, node_count=nodes, tol=tol)
    return second_kind.residual_checks(cfg, s, x, quad, rel_tol=rel)


def cmd_weights(args, cfg):
    if not cfg.is_gould_hopper():
        raise UsageError("weights are available for the Gould-Hopper family only")
    tol = args.precision
    if args.what == "eval":
        quad = second_kind.ContourSpec(cfg.d, offset=args.offset, node_count=args.nodes, tol=tol)
        res = second_kind.eval_nu(cfg, _parse_complex(args.s), _parse_complex(args.x), quad)
        data = {"value": res.value, "error": res.error, "radius": res.radius, "panels": res.panels}
        table = (["re", "im", "error"], [[repr(res.value.real), repr(res.value.imag), repr(res.error)]])
        return True, data, [], table
    rng = random.Random(args.seed)
    points = []
    for _ in range(_positive("--points", args.points, allow_zero=False)):
        s = round(rng.uniform(-3.0, 3.0), 6)
        x = round(rng.uniform(-1.5, 1.5), 6)
        points.append((cfg.d, s, x, args.offset, args.nodes, tol, args.rel_tol))
    threads = _threads()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_residual_job, points))
    else:
        reports = [_residual_job(p) for p in points]
    rows = []
    for r in reports:
        det = r.details
        rows.append([det["s"].real, det["x"].real] + [det[k]["residual"] / max(det[k]["scale"], 1e-300) for k in ("ode", "recurrence", "lowering")])
    return all(reports), {"points": [p[1:3] for p in points]}, reports, (["s", "x", "ode", "recurrence", "lowering"], rows)


def cmd_expand(args, cfg):
    try:
        s = Fraction(args.s)
    except ValueError:
        raise UsageError(f"--s must be rational, got {args.s!r}") from None
    order = _positive("--order", args.order)
    try:
        e = second_kind.asymptotic_expansion(cfg, s, order, method=args.method)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    check = CheckReport("expansion cross-check", details={"d": cfg.d, "s": s, "order": order})
    other = second_kind.asymptotic_expansion(cfg, s, order, method="ode" if args.method == "saddle" else "saddle")
    check.tick()
    if other.tail != e.tail:
        check.fail(kind="saddle vs ode", first=e.tail, second=other.tail)
    check.tick()
    bad = e.lattice_violations()
    if bad:
        check.fail(kind="lattice", exponents=bad)
    data = {
        "d": cfg.d,
        "s": rat(s),
        "exponent_coeff": rat(e.exponent_coeff),
        "power_shift": rat(e.power_shift),
        "tail": [{"exponent": k, "coeff": rat(c)} for k, c in sorted(e.tail.items(), reverse=True)],
    }
    rows = [[k, _fmt(c)] for k, c in sorted(e.tail.items(), reverse=True)]
    return check.passed, data, [check], (["exponent", "coeff"], rows)


def _plane(args, cfg):
    if not cfg.is_gould_hopper() or cfg.d < 2:
        raise UsageError("planes are built for the Gould-Hopper family with d >= 2")
    D = _positive("--degree", args.degree)
    depth = args.depth if args.depth is not None else D + 4
    if depth < D:
        raise UsageError("--depth must be at least --degree")
    return D, grassmann.normalize_plane(grassmann.plane_from_family(cfg, args.m, depth))


def cmd_tau(args, cfg):
    D, plane = _plane(args, cfg)
    tau = grassmann.tau_series(plane, D)
    check = CheckReport("tau normalization", details={"m": args.m, "D": D})
    check.tick()
    if tau.constant != 1:
        check.fail(constant=tau.constant)
    data = tau.to_dict()
    data["depends_on"] = [k for k in range(1, tau.K + 1) if tau.depends_on(k)]
    rows = [[" ".join(f"t{k}^{e}" for k, e in t["monomial"]), _fmt(Fraction(int(t["coeff"][0]), int(t["coeff"][1])))] for t in data["terms"]]
    return check.passed, data, [check], (["monomial", "coeff"], rows)


def cmd_plucker(args, cfg):
    D, plane = _plane(args, cfg)
    coords = []
    for lam in partitions_up_to(D):
        c = grassmann.plucker_coordinate(plane, lam)
        if c:
            coords.append({"partition": list(lam), "value": rat(c)})
    reports = [grassmann.plucker_relations_check(plane, D), grassmann.reduction_check(plane, cfg.d)]
    rows = [[" ".join(map(str, c["partition"])), _fmt(Fraction(int(c["value"][0]), int(c["value"][1])))] for c in coords]
    return all(reports), {"coordinates": coords}, reports, (["partition", "value"], rows)


def cmd_virasoro(args, cfg):
    d = cfg.d
    D = _positive("--degree", args.degree)
    K = args.K if args.K is not None else max(D, 3 * d)
    try:
        fam = virasoro.build_virasoro(d, args.m, K, args.convention)
    except virasoro.CapTooSmall as exc:
        raise UsageError(str(exc)) from None
    if args.what == "build":
        data = {
            "d": d,
            "m": args.m,
            "K": K,
            "convention": fam.convention,
            "convention_log": list(fam.convention_log),
            "operators": {str(k): fam.mode(k).to_dict() for k in (-1, 0, 1, 2)},
        }
        rows = [[k, len(fam.mode(k).terms), _fmt(fam.mode(k).constant)] for k in (-1, 0, 1, 2)]
        return True, data, [], (["mode", "terms", "constant"], rows)
    reports = [virasoro.check_commutation(fam, 2, min(D, 6))]
    if d >= 2:
        _, plane = _plane(args, cfg)
        tau = grassmann.tau_series(plane, D)
        fam_tau = virasoro.build_virasoro(d, args.m, max(K, D), args.convention)
        reports.append(virasoro.check_constraints(tau, fam_tau, args.k_max))
    data = {"convention_log": list(fam.convention_log)}
    return all(reports), data, reports, _report_table(reports)


def cmd_toda(args, cfg):
    if not cfg.is_gould_hopper():
        raise UsageError("the Lax operator is available for the Gould-Hopper family only")
    D = toda.lax_operator(cfg)
    order = _positive("--order", args.order, allow_zero=False)
    if args.what == "root":
        R = toda.dth_root(D, order=order)
        reports = [toda.verify_root(D, order)]
        data = {"root": R.to_dict()}
        rows = [[k, " ".join(_fmt(c) for c in f.dense())] for k, f in sorted(R.terms.items())]
        return all(reports), data, reports, (["degree", "coeffs"], rows)
    k = _positive("--k", args.k, allow_zero=False)
    reports = [toda.verify_flows(D, (k,), order)]
    data = {}
    rows = []
    if reports[0].passed:
        res = toda.flow_rhs(D, k, order=order)
        data = {"band": list(res.band), "rhs": res.rhs().to_dict(), "wave_flow": res.wave_flow.to_dict()}
        rows = [[deg, " ".join(_fmt(c) for c in f.dense())] for deg, f in sorted(res.rhs().terms.items())]
    return all(reports), data, reports, (["degree", "coeffs"], rows)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=2, help="family order d (default 2)")
    common.add_argument("--q-coeffs", default=None, help="comma-separated a_1..a_(d+1); default Gould-Hopper")
    common.add_argument("--m", type=int, default=-1, help="charge m (default -1)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=float, default=1e-10, help="numeric tolerance in (0, 1)")

    parser = argparse.ArgumentParser(prog="bispectra", description="Exact checks for Bochner-type polynomial families.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polys", parents=[common], help="coefficient table of P_n")
    p.add_argument("--max-n", type=int, default=10)

    p = sub.add_parser("moments", parents=[common], help="moments of the first weight")
    p.add_argument("--count", type=int, default=10)

    p = sub.add_parser("verify", parents=[common], help="exact identity checks")
    p.add_argument("what", choices=("bochner", "orthogonality"))
    p.add_argument("--max-n", type=int, default=None)

    p = sub.add_parser("weights", parents=[common], help="second-kind functions by quadrature")
    p.add_argument("what", choices=("eval", "residuals"))
    p.add_argument("--s", default="-1")
    p.add_argument("--x", default="0")
    p.add_argument("--offset", type=float, default=0.5)
    p.add_argument("--nodes", type=int, default=4)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--rel-tol", type=float, default=1e-8)

    p = sub.add_parser("expand", parents=[common], help="asymptotic tails of nu(s)")
    p.add_argument("--s", default="-1")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--method", choices=("saddle", "ode"), default="saddle")

    for name, helptext in (("tau", "truncated tau series"), ("plucker", "Plücker coordinates and relations")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--degree", type=int, default=6)
        p.add_argument("--depth", type=int, default=None)

    p = sub.add_parser("virasoro", parents=[common], help="Virasoro operators and constraints")
    p.add_argument("what", choices=("build", "check"))
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--K", type=int, default=None, help="variable cap")
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--convention", choices=("resolved", "literal"), default="resolved")

    p = sub.add_parser("toda", parents=[common], help="Lax operator roots and flows")
    p.add_argument("what", choices=("root", "flow"))
    p.add_argument("--order", type=int, default=12)
    p.add_argument("--k", type=int, default=1)
    return parser


COMMANDS = {
    "polys": cmd_polys,
    "moments": cmd_moments,
    "verify": cmd_verify,
    "weights": cmd_weights,
    "expand": cmd_expand,
    "tau": cmd_tau,
    "plucker": cmd_plucker,
    "virasoro": cmd_virasoro,
    "toda": cmd_toda,
}


def _render(fmt: str, envelope: dict, table) -> str:
    if fmt == "json":
        return json.dumps(envelope, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header, rows = table
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def run(argv=None) -> tuple[int, str]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_USAGE), ""
    try:
        if not 0 < args.precision < 1:
            raise UsageError("--precision must lie in (0, 1)")
        if args.command == "verify" and args.max_n is None:
            args.max_n = 40 if args.what == "bochner" else 20
        _threads()
        cfg = _config(args)
        passed, data, reports, table = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"bispectra: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, ""
    envelope = {
        "command": args.command + (f" {args.what}" if hasattr(args, "what") else ""),
        "config": {
            "d": cfg.d,
            "q_coeffs": [rat(c) for c in cfg.q_coeffs],
            "m": args.m,
            "seed": args.seed,
            "precision": args.precision,
        },
        "passed": bool(passed),
        "reports": [r.to_dict() for r in reports],
        "data": jsonable(data),
    }
    return (EXIT_OK if passed else EXIT_CHECK_FAILED), _render(args.format, envelope, table)


def main(argv=None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
