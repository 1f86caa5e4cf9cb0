"""Command-line front end: ``simplex-approx <subcommand> [flags]``.

Exit status: 0 on success, 1 when a gated check fails, 2 on usage errors.
Exact-identity suites gate on equality, the orthogonality and derivative
checks on their tolerances, and measured-constant experiments only on the
trend check (``theorem31`` and ``bernstein``).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import random
import re
import sys
import tempfile
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__, _accel
from . import estimates as est
from . import exact_ident as ei
from .functions import get_specimen, registry_ids, symbolic_basis_partial
from .quadrature import triangle_rule
from .tri_basis import WeightParams, basis_eval, basis_norms, basis_partial, basis_table, num_basis

log = logging.getLogger("simplex_approx")

SCHEMA_VERSION = 1
ORTHO_TOL = 1e-10
DIFF_TOL = 1e-9
FD_TOL = 1e-7
FD_STEP = 1e-5
GATED_TRENDS = ("theorem31", "bernstein")
EXPERIMENTS = ("endecay", "theorem31", "corollary", "jackson", "inverse", "kequiv", "bernstein")


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- parsing


def parse_real(text: str) -> float:
    """Decimal or ``p/q``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a decimal or p/q rational: {text!r}") from exc


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}") from exc


def _weight(args) -> WeightParams:
    try:
        return WeightParams(args.alpha, args.beta, args.gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _degrees(args, default_min: int) -> list[int]:
    lo = default_min if args.n_min is None else args.n_min
    if args.n_max < lo:
        raise UsageError(f"empty degree range {lo}..{args.n_max}")
    return list(range(lo, args.n_max + 1))


# ----------------------------------------------------------------- output


def header_line(command: str) -> str:
    return f"# simplex-approx {command} schema v{SCHEMA_VERSION}"


def write_output(text: str, out: Optional[str]) -> None:
    """Write to stdout, or to ``out`` atomically via a temp file and rename."""
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(out))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_doc(command: str, body: dict) -> str:
    doc = {"schema": f"simplex-approx/{command}", "version": SCHEMA_VERSION, **body}
    return json.dumps(doc, indent=1, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Fraction):
        return ei.format_rational(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_table(command: str, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(header_line(command) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _g(v: float) -> str:
    return format(float(v), ".17g")


# ------------------------------------------------------------ orthogonality


def cmd_orthogonality(args) -> int:
    w = _weight(args)
    N = args.n_max
    if N < 0:
        raise UsageError("--n-max must be non-negative")
    rule = triangle_rule(2 * N, w)
    B = basis_table(N, w, rule.x, rule.y)
    gram = (B * rule.weights) @ B.T
    h = basis_norms(N, w)
    off = gram - np.diag(np.diag(gram))
    diag_rel = np.abs(np.diag(gram) - h) / h
    scaled = np.abs(off) / np.sqrt(np.outer(h, h))
    ok = bool(np.max(np.abs(off)) <= ORTHO_TOL and np.max(diag_rel) <= ORTHO_TOL)
    labels = [(k, m) for m in range(N + 1) for k in range(m + 1)]
    worst = []
    if num_basis(N) > 1:
        i, j = np.unravel_index(np.argmax(scaled), scaled.shape)
        worst.append({"pair": [labels[i], labels[j]], "abs": float(abs(off[i, j])), "scaled": float(scaled[i, j])})
    d = int(np.argmax(diag_rel))
    worst.append({"index": labels[d], "diag_rel": float(diag_rel[d])})
    summary = {
        "params": {"alpha": w.alpha, "beta": w.beta, "gamma": w.gamma},
        "max_degree": N,
        "quadrature_nodes": rule.size,
        "max_offdiag_abs": float(np.max(np.abs(off))),
        "max_offdiag_scaled": float(np.max(scaled)),
        "max_diag_rel": float(np.max(diag_rel)),
        "tolerance": ORTHO_TOL,
        "pass": ok,
        "worst": worst,
    }
    if args.format == "json":
        text = _json_doc("orthogonality", summary)
    else:
        text = _csv_table("orthogonality", ["quantity", "value"],
                          [[key, _g(summary[key])] for key in ("max_offdiag_abs", "max_offdiag_scaled", "max_diag_rel")]
                          + [["pass", str(ok).lower()]])
    write_output(text, args.out)
    if not ok:
        print(f"orthogonality check failed: {json.dumps(worst)}", file=sys.stderr)
    return 0 if ok else 1


# ------------------------------------------------------------ derivatives


def interior_points(n: int, seed: int, margin: float = 0.02):
    """Points uniformly spread over the triangle shrunk by ``margin``."""
    rng = np.random.default_rng(seed)
    u, v = rng.random(n), rng.random(n)
    flip = u + v > 1
    u[flip], v[flip] = 1 - u[flip], 1 - v[flip]
    scale = 1 - 3 * margin
    return margin + scale * u, margin + scale * v


def _fd_partial(direction: int, k: int, n: int, w: WeightParams, x, y, h: float = FD_STEP):
    ex, ey = {1: (1.0, 0.0), 2: (0.0, 1.0), 3: (-1.0, 1.0)}[direction]
    return (basis_eval(k, n, w, x + h * ex, y + h * ey) - basis_eval(k, n, w, x - h * ex, y - h * ey)) / (2 * h)


def diffrel_rows(w: WeightParams, N: int, points: int, seed: int):
    """Per (k, n, direction): relation residual against the symbolic derivative and the FD gap."""
    x, y = interior_points(points, seed)
    rows = []
    for n in range(N + 1):
        for k in range(n + 1):
            for direction in (1, 2, 3):
                rel = basis_partial(direction, k, n, w, x, y)
                exact = symbolic_basis_partial(k, n, *w.as_tuple(), direction)(x, y)
                fd = _fd_partial(direction, k, n, w, x, y)
                rows.append((k, n, direction, float(np.max(np.abs(rel - exact))), float(np.max(np.abs(rel - fd)))))
    return rows


def cmd_diffrel(args) -> int:
    w = _weight(args)
    rows = diffrel_rows(w, args.n_max, args.points, args.seed)
    worst_rel = max(r[3] for r in rows)
    worst_fd = max(r[4] for r in rows)
    ok = worst_rel <= DIFF_TOL and worst_fd <= FD_TOL
    if args.format == "json":
        text = _json_doc("diffrel", {
            "params": {"alpha": w.alpha, "beta": w.beta, "gamma": w.gamma}, "max_degree": args.n_max,
            "points": args.points, "seed": args.seed, "max_residual": worst_rel, "max_fd_gap": worst_fd,
            "pass": ok, "rows": [dict(zip(("k", "n", "direction", "residual", "fd_gap"), r)) for r in rows]})
    else:
        text = _csv_table("diffrel", ["k", "n", "direction", "residual", "fd_gap"],
                          [[k, n, d, _g(a), _g(b)] for k, n, d, a, b in rows])
    write_output(text, args.out)
    return 0 if ok else 1


# ------------------------------------------------------------ exact suites


def _sweep_family(rng, r_max, seeds):
    for r1 in range(1, r_max + 1):
        for r2 in range(1, r_max + 1):
            for _ in range(seeds):
                spec = ei.random_family_spec(rng, r1, r2)
                yield ei.record("family", spec.as_dict(), *ei.family_det_pair(spec))


def _sweep_laplace(rng, r_max, seeds):
    for r1 in range(1, r_max + 1):
        for r2 in range(1, r_max + 1):
            if r1 + r2 > 6:
                continue
            for _ in range(seeds):
                spec = ei.random_family_spec(rng, r1, r2)
                ok = ei.laplace_check(spec)
                det = ei.det_exact(ei.build_M_general(spec))
                lhs = sum((t for _, t in ei.laplace_terms(spec)), Fraction(0))
                rec = ei.record("laplace", spec.as_dict(), lhs, det)
                rec["equal"] = ok and rec["equal"]
                yield rec


def _sweep_minor(rng, r_max, seeds):
    for r1 in range(1, r_max + 1):
        for r2 in range(1, r_max + 1):
            for _ in range(max(1, seeds // 5)):
                spec = ei.random_family_spec(rng, r1, r2)
                for ks in itertools.combinations(range(r1 + r2), r2):
                    params = {**spec.as_dict(), "ks": list(ks)}
                    try:
                        yield ei.record("minor", params, *ei.band_minor_pair(r1, r2, spec.s1, spec.s2, ks))
                    except ei.ParameterDomainError as exc:
                        log.info("minor rejected %s: %s", params, exc)


def _sweep_sum(rng, r_max, seeds):
    for r in range(1, r_max + 1):
        for m in range(0, 7):
            for _ in range(seeds):
                a, b = ei.random_sum_params(rng, r, m)
                params = {"r": r, "m": m, "a": ei.format_rational(a), "b": ei.format_rational(b)}
                yield ei.record("sum", params, *ei.alternating_sum_pair(r, m, a, b))


MR_SWEEP_PARAMS = (Fraction(0), Fraction(1, 2), Fraction(-1, 4), Fraction(7, 3))


def _sweep_mr(rng, r_max, seeds):
    for r in range(1, r_max + 1):
        for k in range(0, 5):
            for a in MR_SWEEP_PARAMS:
                for b in MR_SWEEP_PARAMS:
                    base = {"r": r, "k": k, "alpha": ei.format_rational(a), "beta": ei.format_rational(b)}
                    for n in range(k, k + 2 * r + 7):
                        yield ei.record("mr", {**base, "n": n}, *ei.mr_det_pair(r, k, n, a, b))
                    yield ei.record("mr_reduced", base, *ei.mr_reduced_det_pair(r, k, a, b))
                    family = ei.mr_as_family(r, k, a, b)
                    yield ei.record("mr_family", base, ei.det_exact(ei.build_M_general(family)),
                                    ei.mr_reduced_det_pair(r, k, a, b)[1])


SUITES: dict[str, Callable] = {
    "family": _sweep_family,
    "mr": _sweep_mr,
    "minor": _sweep_minor,
    "sum": _sweep_sum,
    "laplace": _sweep_laplace,
}


def cmd_det_verify(args) -> int:
    records = []
    if args.s1 is not None or args.s2 is not None:
        if args.s1 is None or args.s2 is None:
            raise UsageError("--s1 and --s2 must be given together")
        try:
            spec = ei.DetFamilySpec(args.r1, args.r2, args.s1, args.s2)
        except (ei.ParameterDomainError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        records.append(ei.record("family", spec.as_dict(), *ei.family_det_pair(spec)))
    else:
        suites = list(SUITES) if args.suite == "all" else [args.suite]
        for name in suites:
            rng = random.Random(args.seed)
            records.extend(SUITES[name](rng, args.r_max, args.seeds))
    header = json.dumps({"schema": "simplex-approx/det-verify", "version": SCHEMA_VERSION,
                         "records": len(records)}, sort_keys=True)
    text = "\n".join([header] + [ei.to_json_line(rec) for rec in records]) + "\n"
    write_output(text, args.out)
    failed = [rec for rec in records if not rec["equal"]]
    for rec in failed[:10]:
        print(f"identity failed: {ei.to_json_line(rec)}", file=sys.stderr)
    return 0 if not failed else 1


# ------------------------------------------------------------ experiments


def _specimen(args):
    try:
        return get_specimen(args.f, args.seed)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def bernstein_fixed(spec, w: WeightParams, r: int, direction: int, ns: Sequence[int]) -> est.RatioReport:
    """Bernstein ratio of one polynomial against each degree bound n.

    A specimen of known degree is expanded at exactly that degree, so
    quadrature noise cannot leak into coefficients that are zero.
    """
    degree = getattr(spec, "polynomial_degree", None)
    tab, _ = spec.expansion(w, max(ns) if degree is None else degree)
    rows = []
    for n in ns:
        ratio = est.bernstein_ratio(tab, r, direction, n)
        rows.append(est.make_row(n, ratio * n ** r, float(n ** r)))
    return est.RatioReport("bernstein", {"alpha": w.alpha, "beta": w.beta, "gamma": w.gamma, "r": r,
                                         "f": spec.name, "direction": direction}, tuple(rows))


def run_experiment(args) -> list[est.RatioReport]:
    w = _weight(args)
    r = args.r
    exp = args.experiment
    try:
        if exp == "bernstein":
            ns = _degrees(args, 1)
            if args.f is None:
                return [est.bernstein_sweep(w, r, args.direction, ns, args.samples, args.seed)]
            return [bernstein_fixed(_specimen(args), w, r, args.direction, ns)]
        if args.f is None:
            raise UsageError(f"--f is required for experiment {exp}")
        spec = _specimen(args)
        if exp == "endecay":
            return [est.endecay(spec, w, _degrees(args, 0))]
        if exp == "theorem31":
            return [est.main_estimate_ratio(spec, w, r, _degrees(args, 3 * r), dps=args.dps)]
        if exp == "corollary":
            return [est.corollary_ratio(spec, w, r, _degrees(args, 3 * r))]
        if exp == "jackson":
            return [est.jackson_ratio(spec, w, r, _degrees(args, 1))]
        if exp == "inverse":
            return [est.inverse_estimate_check(spec, w, r, _degrees(args, 1))]
        if exp == "kequiv":
            ns = _degrees(args, 1)
            return list(est.k_equiv_check(spec, w, r, [1.0 / n for n in ns], N=max(ns) + r + 4))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown experiment {exp!r}")


def cmd_approx(args) -> int:
    reports = run_experiment(args)
    if args.format == "json":
        text = _json_doc("approx", {"experiment": args.experiment, "reports": [rep.to_dict() for rep in reports]})
    else:
        parts = [header_line(f"approx/{args.experiment}")]
        for rep in reports:
            parts.append(f"# {rep.experiment} sup_ratio={rep.sup_ratio} trend_pass={rep.trend()} "
                         f"params={json.dumps(rep.params, sort_keys=True)}")
            parts.append(rep.to_csv().rstrip("\n"))
        text = "\n".join(parts) + "\n"
    write_output(text, args.out)
    status = 0
    for rep in reports:
        if not rep.all_finite():
            status = 1
        if rep.experiment in GATED_TRENDS and rep.trend() is False:
            print(f"trend check failed for {rep.experiment} {rep.params}", file=sys.stderr)
            status = 1
    return status


def cmd_coeffs(args) -> int:
    w = _weight(args)
    spec = _specimen(args)
    if args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    tab, nsq = spec.expansion(w, args.n_max)
    if args.format == "json":
        # the envelope adds schema keys; CoeffTable.from_json ignores them
        text = _json_doc("coeffs", {"f": spec.name, "norm_sq": nsq, **json.loads(tab.to_json())})
    else:
        rows = [[k, m, _g(tab[k, m]), _g(tab.norms[m * (m + 1) // 2 + k])]
                for m in range(tab.max_degree + 1) for k in range(m + 1)]
        text = _csv_table("coeffs", ["k", "m", "coefficient", "norm_sq"], rows)
    write_output(text, args.out)
    return 0


# ------------------------------------------------------------ parser


# argparse only recognizes decimal negatives as values; admit "-p/q" as well
_NEGATIVE_VALUE = re.compile(r"^-(\d+|\d*\.\d+([eE][-+]?\d+)?|\d+/\d+)$")


def _accept_negative_rationals(p: argparse.ArgumentParser) -> None:
    p._negative_number_matcher = _NEGATIVE_VALUE


def _add_common(p: argparse.ArgumentParser, n_max: int) -> None:
    _accept_negative_rationals(p)
    p.add_argument("--alpha", type=parse_real, default=0.0, help="weight exponent of x (decimal or p/q, > -1)")
    p.add_argument("--beta", type=parse_real, default=0.0, help="weight exponent of y (decimal or p/q, > -1)")
    p.add_argument("--gamma", type=parse_real, default=0.0, help="weight exponent of 1-x-y (decimal or p/q, > -1)")
    p.add_argument("--n-max", type=int, default=n_max, help=f"largest degree (default {n_max})")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps (default 0)")
    p.add_argument("--out", default="-", help="output path; '-' writes to stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simplex-approx",
                                     description="Fourier-Jacobi analysis on the triangle: checks and experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orthogonality", help="Gram matrix of the basis against the closed-form norms")
    _add_common(p, 8)
    p.set_defaults(func=cmd_orthogonality)

    p = sub.add_parser("diffrel", help="derivative relations against symbolic and finite-difference derivatives")
    _add_common(p, 8)
    p.add_argument("--points", type=int, default=50, help="random interior points (default 50)")
    p.set_defaults(func=cmd_diffrel)

    p = sub.add_parser("det-verify", help="exact rational determinant and summation identities (JSON lines)")
    _accept_negative_rationals(p)
    p.add_argument("--suite", choices=("all",) + tuple(SUITES), default="all", help="identity family to sweep")
    p.add_argument("--r-max", type=int, default=3, help="largest order in the sweep (default 3)")
    p.add_argument("--seeds", type=int, default=10, help="random parameter draws per shape (default 10)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--r1", type=int, default=1, help="r1 for a single explicit case")
    p.add_argument("--r2", type=int, default=1, help="r2 for a single explicit case")
    p.add_argument("--s1", type=parse_rational, default=None, help="s1 (p/q) for a single explicit case")
    p.add_argument("--s2", type=parse_rational, default=None, help="s2 (p/q) for a single explicit case")
    p.add_argument("--out", default="-", help="output path; '-' writes to stdout")
    p.set_defaults(func=cmd_det_verify)

    p = sub.add_parser("approx", help="approximation experiments with ratio tables")
    _add_common(p, 24)
    p.add_argument("--experiment", choices=EXPERIMENTS, required=True, help="which experiment to run")
    p.add_argument("--f", default=None, help=f"function id: {', '.join(registry_ids())}")
    p.add_argument("--r", type=int, default=1, help="derivative order (default 1)")
    p.add_argument("--n-min", type=int, default=None, help="smallest degree (default depends on experiment)")
    p.add_argument("--direction", type=int, choices=(1, 2, 3), default=1, help="bernstein: derivative direction")
    p.add_argument("--samples", type=int, default=200, help="bernstein: random polynomials per degree")
    p.add_argument("--dps", type=int, default=None,
                   help="theorem31: compute errors with mpmath at this many digits (analytic f only)")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("coeffs", help="expand a registry function and serialize its coefficient table")
    _add_common(p, 10)
    p.add_argument("--f", required=True, help=f"function id: {', '.join(registry_ids())}")
    p.set_defaults(func=cmd_coeffs)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    _accel.apply_thread_cap()
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    return 2  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
