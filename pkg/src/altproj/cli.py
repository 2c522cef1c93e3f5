"""Command-line front end: instance files in, CSV reports out.

Instance files are a versioned line-based text format ("altproj-instance
v1", one ``key value...`` pair per line) so fixtures stay diff-able; see
``parse_instance``/``serialize_instance``.  Every command is
deterministic for a fixed flag set: randomized commands require an
explicit --seed, output files are written atomically (temp + rename),
and reruns produce byte-identical CSVs.

Exit codes: 0 ok; 2 malformed instance file or invalid configuration;
3 numerical contract violation (including any failed suite criterion);
4 capacity limit reached (e.g. an infeasible slow-vector horizon).
"""

import argparse
import csv
import io
import os
import sys
import tempfile

import numpy as np

from .acceptance import criterion_ids, iter_results
from .errors import CapacityError, NumericalContractError, ParseError
from .fracpow import decay_slope, make_alpha_vector
from .geometry import friedrichs_number, geometry_report, iota2
from .iteration import iterate
from .models import InstanceSpec, block_aligned, convex_combination, slow_vector
from .spectral import containment_check, resolvent_diagnostic, ritt_power_diagnostic

__all__ = ["main", "parse_instance", "serialize_instance", "parse_instance_text"]

_VERSION_LINE = "altproj-instance v1"

_EXIT_DOC = """\
exit codes:
  0  success
  2  parse error: malformed instance file or invalid configuration
  3  numerical contract violation (includes any failed suite criterion)
  4  capacity limit reached (e.g. slow-vector horizon infeasible)
"""


def _g(x: float) -> str:
    """Canonical float formatting: 17 significant digits, locale-free."""
    return "%.17g" % float(x)


# ---------------------------------------------------------------------------
# instance files


def _parse_int(value: str, field: str, line_no: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"line {line_no}: field '{field}' needs an integer, got {value!r}")


def _parse_float(value: str, field: str, line_no: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"line {line_no}: field '{field}' needs a number, got {value!r}")


def _parse_component(tokens: list, line_no: int) -> InstanceSpec:
    """One ``component <kind> key=value...`` line of a convex combination."""
    if not tokens:
        raise ParseError(f"line {line_no}: component line is missing its kind")
    kind = tokens[0]
    fields = {}
    for tok in tokens[1:]:
        key, eq, value = tok.partition("=")
        if not eq or not value:
            raise ParseError(f"line {line_no}: component field {tok!r} is not key=value")
        if key in fields:
            raise ParseError(f"line {line_no}: duplicate component field '{key}'")
        fields[key] = value

    def take(key):
        if key not in fields:
            raise ParseError(f"line {line_no}: component kind '{kind}' needs field '{key}'")
        return fields.pop(key)

    if kind == "random":
        seed = _parse_int(take("seed"), "seed", line_no)
        d = _parse_int(take("d"), "d", line_no)
        dims = tuple(_parse_int(v, "dims", line_no) for v in take("dims").split(","))
        spec = InstanceSpec("random", {"d": d, "dims": dims}, seed)
    elif kind == "two_lines":
        spec = InstanceSpec("two_lines", {"theta": _parse_float(take("theta"), "theta", line_no)})
    elif kind == "block_aligned":
        k = _parse_int(take("k_blocks"), "k_blocks", line_no)
        if "angles" in fields:
            rule = tuple(_parse_float(v, "angles", line_no) for v in take("angles").split(","))
        else:
            rule = take("angle_rule")
        spec = InstanceSpec("block_aligned", {"k_blocks": k, "angle_rule": rule})
    else:
        raise ParseError(f"line {line_no}: unknown component kind '{kind}'")
    if fields:
        extra = ", ".join(sorted(fields))
        raise ParseError(f"line {line_no}: unexpected component field(s) {extra}")
    return spec


def parse_instance_text(text: str) -> InstanceSpec:
    """Parse the versioned key-value instance format from a string."""
    entries = []  # (line_no, key, value tokens)
    version_seen = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if not version_seen:
            if line != _VERSION_LINE:
                raise ParseError(
                    f"line {line_no}: expected version header '{_VERSION_LINE}', got {line!r}"
                )
            version_seen = True
            continue
        key, *rest = line.split()
        entries.append((line_no, key, rest))
    if not version_seen:
        raise ParseError("line 1: missing version header "
                         f"'{_VERSION_LINE}' (empty file)")

    fields = {}
    components = []
    for line_no, key, rest in entries:
        if key == "component":
            components.append(_parse_component(rest, line_no))
            continue
        if key in fields:
            raise ParseError(f"line {line_no}: duplicate field '{key}'")
        fields[key] = (line_no, rest)

    def take(key, kind):
        if key not in fields:
            raise ParseError(f"field '{key}' is required for kind '{kind}' and is missing")
        line_no, rest = fields.pop(key)
        if not rest:
            raise ParseError(f"line {line_no}: field '{key}' has no value")
        return line_no, rest

    if "kind" not in fields:
        raise ParseError("field 'kind' is missing")
    kind_line, kind_rest = fields.pop("kind")
    if len(kind_rest) != 1:
        raise ParseError(f"line {kind_line}: field 'kind' needs exactly one value")
    kind = kind_rest[0]

    if kind == "random":
        ln, v = take("seed", kind)
        if len(v) != 1:
            raise ParseError(f"line {ln}: field 'seed' needs exactly one value")
        seed = _parse_int(v[0], "seed", ln)
        ln, v = take("d", kind)
        if len(v) != 1:
            raise ParseError(f"line {ln}: field 'd' needs exactly one value")
        d = _parse_int(v[0], "d", ln)
        ln, v = take("dims", kind)
        dims = tuple(_parse_int(tok, "dims", ln) for tok in v)
        if len(dims) < 2:
            raise ParseError(f"line {ln}: field 'dims' needs at least two ranks")
        spec = InstanceSpec("random", {"d": d, "dims": dims}, seed)
    elif kind == "two_lines":
        ln, v = take("theta", kind)
        if len(v) != 1:
            raise ParseError(f"line {ln}: field 'theta' needs exactly one value")
        spec = InstanceSpec("two_lines", {"theta": _parse_float(v[0], "theta", ln)})
    elif kind == "block_aligned":
        ln, v = take("k_blocks", kind)
        if len(v) != 1:
            raise ParseError(f"line {ln}: field 'k_blocks' needs exactly one value")
        k = _parse_int(v[0], "k_blocks", ln)
        if "angles" in fields and "angle_rule" in fields:
            raise ParseError("fields 'angles' and 'angle_rule' are mutually exclusive")
        if "angles" in fields:
            ln, v = take("angles", kind)
            rule = tuple(_parse_float(tok, "angles", ln) for tok in v)
        else:
            ln, v = take("angle_rule", kind)
            if len(v) != 1:
                raise ParseError(f"line {ln}: field 'angle_rule' needs exactly one value")
            rule = v[0]
            if rule not in ("1/k", "1/sqrt(k)"):
                raise ParseError(
                    f"line {ln}: field 'angle_rule' must be '1/k' or '1/sqrt(k)', got {rule!r}"
                )
        spec = InstanceSpec("block_aligned", {"k_blocks": k, "angle_rule": rule})
    elif kind == "convex_combination":
        ln, v = take("weights", kind)
        weights = tuple(_parse_float(tok, "weights", ln) for tok in v)
        if not components:
            raise ParseError("kind 'convex_combination' needs at least one component line")
        if len(weights) != len(components):
            raise ParseError(
                f"line {ln}: {len(weights)} weights for {len(components)} component lines"
            )
        spec = InstanceSpec("convex_combination",
                            {"weights": weights, "components": tuple(components)})
    else:
        raise ParseError(f"line {kind_line}: unknown kind '{kind}'")

    if components and kind != "convex_combination":
        raise ParseError("component lines are only valid for kind 'convex_combination'")
    if fields:
        line_no, _ = min(fields.values())
        name = next(k for k, (ln2, _) in fields.items() if ln2 == line_no)
        raise ParseError(f"line {line_no}: unknown field '{name}' for kind '{kind}'")

    try:
        spec.realize()  # surface bad parameter values as parse errors with the field name
    except ParseError:
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(f"invalid parameters for kind '{kind}': {exc}")
    return spec


def parse_instance(path) -> InstanceSpec:
    """Read and parse one instance file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read instance file {path}: {exc.strerror or exc}")
    return parse_instance_text(text)


def _component_line(spec: InstanceSpec) -> str:
    p = spec.parameters
    if spec.kind == "random":
        dims = ",".join(str(r) for r in p["dims"])
        return f"component random seed={spec.seed} d={p['d']} dims={dims}"
    if spec.kind == "two_lines":
        return f"component two_lines theta={_g(p['theta'])}"
    rule = p["angle_rule"]
    if isinstance(rule, str):
        return f"component block_aligned k_blocks={p['k_blocks']} angle_rule={rule}"
    angles = ",".join(_g(a) for a in rule)
    return f"component block_aligned k_blocks={p['k_blocks']} angles={angles}"


def serialize_instance(spec: InstanceSpec) -> str:
    """Canonical text form; parse(serialize(s)) reproduces s exactly."""
    lines = [_VERSION_LINE, f"kind {spec.kind}"]
    p = spec.parameters
    if spec.kind == "random":
        lines.append(f"seed {spec.seed}")
        lines.append(f"d {p['d']}")
        lines.append("dims " + " ".join(str(r) for r in p["dims"]))
    elif spec.kind == "two_lines":
        lines.append(f"theta {_g(p['theta'])}")
    elif spec.kind == "block_aligned":
        lines.append(f"k_blocks {p['k_blocks']}")
        rule = p["angle_rule"]
        if isinstance(rule, str):
            lines.append(f"angle_rule {rule}")
        else:
            lines.append("angles " + " ".join(_g(a) for a in rule))
    else:
        lines.append("weights " + " ".join(_g(w) for w in p["weights"]))
        for comp in p["components"]:
            comp = comp if isinstance(comp, InstanceSpec) else InstanceSpec(**comp)
            lines.append(_component_line(comp))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# output plumbing


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".altproj-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, header, rows, notes):
    """CSV to --out (atomic) or stdout; human notes to the other stream."""
    text = _csv_text(header, rows)
    if args.out:
        _atomic_write(args.out, text)
        for note in notes:
            print(note)
    else:
        sys.stdout.write(text)
        for note in notes:
            print(note, file=sys.stderr)


# ---------------------------------------------------------------------------
# commands


def _realized(args):
    spec = parse_instance(args.instance)
    return spec, spec.realize()


def _cmd_geometry(args):
    _, inst = _realized(args)
    cp = inst.cyclic()
    rep = geometry_report(inst.subspaces, cp.m, seed=args.seed)
    header = ["N", "c", "ell2", "ell2_direct", "iota2", "ell_est", "iota_est",
              "theta0", "rate_base"]
    row = [str(rep.N)] + [_g(v) for v in (rep.c, rep.ell2, rep.ell2_direct, rep.iota2,
                                          rep.ell_est, rep.iota_est, rep.theta0,
                                          rep.rate_base)]
    notes = [f"c = {_g(rep.c)}", f"ell2 = {_g(rep.ell2)}", f"iota2 = {_g(rep.iota2)}",
             f"rate_base = {_g(rep.rate_base)}"]
    _emit(args, header, [row], notes)
    return 0


def _cmd_iterate(args):
    _, inst = _realized(args)
    cp = inst.cyclic()
    subs = inst.subspaces
    c = friedrichs_number(subs, cp.m)
    i2 = iota2(subs, cp.m)
    if args.seed is None:
        # canonical start: first basis vector of the first subspace; on the
        # two-line instance its errors follow the operator-norm law exactly
        x = np.array(subs[0].basis[:, 0])
    else:
        rng = np.random.default_rng(args.seed)
        x = rng.standard_normal(cp.dim) + 1j * rng.standard_normal(cp.dim)
    tr = iterate(cp, x, args.n_max, c=c, iota2=i2)
    rows = [[str(n), _g(tr.errors[n]), _g(tr.bound_c[n]), _g(tr.bound_iota2[n])]
            for n in range(len(tr.errors))]
    notes = [f"c = {_g(c)}, iota2 = {_g(i2)}",
             f"final error e_{args.n_max} = {_g(tr.errors[-1])}"]
    _emit(args, ["n", "error", "bound_c", "bound_iota2"], rows, notes)
    return 0


def _numrange_operator(spec, inst):
    """Operator, Friedrichs number, and factor count for the containment check."""
    if spec.kind != "convex_combination":
        cp = inst.cyclic()
        return cp, friedrichs_number(inst.subspaces, cp.m), cp.N
    comps = [c if isinstance(c, InstanceSpec) else InstanceSpec(**c)
             for c in spec.parameters["components"]]
    insts = [c.realize() for c in comps]
    cps = [i.cyclic() for i in insts]
    t = convex_combination(cps, spec.parameters["weights"])
    # the result region is governed by the widest component
    return t, max(friedrichs_number(i.subspaces, cp.m) for i, cp in zip(insts, cps)), \
        max(cp.N for cp in cps)


def _cmd_numrange(args):
    spec, inst = _realized(args)
    t, c, n = _numrange_operator(spec, inst)
    rep = containment_check(t, c, n, m=args.angles, slack=args.slack, strict=False)
    b = rep.boundary
    rows = [
        [_g(b.angles[i]), _g(b.support[i]), _g(b.points[i].real), _g(b.points[i].imag),
         str(int(rep.in_omega[i])), str(int(rep.in_stolz[i])), _g(rep.margins[i])]
        for i in range(len(b))
    ]
    worst_z, worst_margin = rep.worst()
    verdict = "contained" if rep.all_contained else "NOT contained"
    notes = [f"W(T) {verdict} in Omega_N and the Stolz domain "
             f"(N = {n}, c = {_g(c)}, slack = {_g(args.slack)})",
             f"worst margin {_g(worst_margin)} at z = {_g(worst_z.real)} + {_g(worst_z.imag)}i"]
    _emit(args, ["phi", "h", "re_z", "im_z", "in_omega", "in_stolz", "margin"], rows, notes)
    return 0 if rep.all_contained else 3


def _cmd_ritt(args):
    _, inst = _realized(args)
    t = inst.dense()
    sup, argmax, profile = ritt_power_diagnostic(t, args.n_max)
    radii = [1.0 + 2.0 ** (-k) for k in range(1, 11)]
    constants = [resolvent_diagnostic(t, radii=[r]) for r in radii]
    rows = [["power", str(n + 1), _g(profile[n])] for n in range(len(profile))]
    rows += [["resolvent", _g(r), _g(v)] for r, v in zip(radii, constants)]
    notes = [f"sup n||T^n(I-T)|| = {_g(sup)} attained at n = {argmax}",
             f"resolvent constant at the finest radius = {_g(constants[-1])}"]
    _emit(args, ["section", "index", "value"], rows, notes)
    return 0


def _cmd_fracpow(args):
    _, inst = _realized(args)
    cp = inst.cyclic()
    window = (max(1, args.n_max // 10), args.n_max)
    rows = []
    notes = []
    for alpha in args.alpha:
        av = make_alpha_vector(cp, alpha, args.seed, tol=args.tol)
        tr = iterate(cp, av.x, args.n_max)
        slope = decay_slope(tr, window)
        ns = np.arange(window[0], window[1] + 1, dtype=float)
        sup = float((ns**alpha * tr.errors[window[0] : window[1] + 1]).max())
        rows.append([_g(alpha), f"{window[0]}:{window[1]}", _g(slope), _g(sup)])
        notes.append(f"alpha = {_g(alpha)}: slope {_g(slope)} on n in "
                     f"[{window[0]}, {window[1]}], sup n^alpha e_n = {_g(sup)}")
    _emit(args, ["alpha", "window", "slope", "sup_n_alpha_e_n"], rows, notes)
    return 0


def _cmd_slowvec(args):
    spec, inst = _realized(args)
    if spec.kind != "block_aligned":
        raise ParseError("slowvec needs an instance of kind 'block_aligned'")
    p = spec.parameters
    model = block_aligned(int(p["k_blocks"]), p["angle_rule"])
    horizon = args.n_max
    ns = np.arange(horizon + 1, dtype=float)
    r = 1.0 / np.log(ns + 2.0)
    x = slow_vector(model, r, horizon, args.eps)
    tr = iterate(model.cyclic(), x, horizon)
    rows = [["vector", str(i), _g(x[i])] for i in range(len(x))]
    rows += [["target", str(n), _g(r[n])] for n in range(horizon + 1)]
    rows += [["error", str(n), _g(tr.errors[n])] for n in range(horizon + 1)]
    margin = float((tr.errors[: horizon + 1] - r).min())
    cap = (1.0 + args.eps) * r[0]
    notes = [f"targets r_n = 1/log(n+2), horizon {horizon}, eps = {_g(args.eps)}",
             f"min e_n - r_n = {_g(margin)}; ||x|| = {_g(float(np.linalg.norm(x)))} "
             f"<= {_g(cap)}"]
    _emit(args, ["section", "index", "value"], rows, notes)
    return 0


def _cmd_suite(args):
    ids = args.criteria if args.criteria else None
    results = []
    failed = 0
    for res in iter_results(ids=ids):
        print(res.line())
        sys.stdout.flush()
        results.append(res)
        failed += 0 if res.passed else 1
    if args.out:
        rows = [[str(r.cid), r.name, "1" if r.passed else "0", r.detail] for r in results]
        _atomic_write(args.out, _csv_text(["cid", "name", "passed", "detail"], rows))
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 0 if failed == 0 else 3


# ---------------------------------------------------------------------------
# argument parsing


def _alpha_list(text: str) -> list:
    try:
        values = [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not values or any(a <= 0.0 for a in values):
        raise argparse.ArgumentTypeError("alpha values must be positive")
    return values


def _criteria_list(text: str) -> list:
    try:
        ids = [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated id list: {text!r}")
    unknown = set(ids) - set(criterion_ids())
    if not ids or unknown:
        raise argparse.ArgumentTypeError(f"criterion ids must be among {criterion_ids()}")
    return ids


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altproj",
        description="Angles, convergence rates and spectral diagnostics for "
                    "cyclic products of orthogonal projections.",
        epilog=_EXIT_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text, func):
        p = sub.add_parser(name, help=help_text, epilog=_EXIT_DOC,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    p = add("geometry", "angle quantities of one instance (CSV row)", _cmd_geometry)
    p.add_argument("--instance", required=True, help="instance file")
    p.add_argument("--seed", required=True, type=int,
                   help="seed for the minimax inclination searches")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = add("iterate", "alternating-projection error trace with rate bounds", _cmd_iterate)
    p.add_argument("--instance", required=True, help="instance file")
    p.add_argument("--n-max", type=_positive_int, default=100, help="sweeps (default 100)")
    p.add_argument("--seed", type=int, default=None,
                   help="seeded random start vector (default: first basis vector "
                        "of the first subspace)")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = add("numrange", "numerical range boundary and containment check", _cmd_numrange)
    p.add_argument("--instance", required=True, help="instance file")
    p.add_argument("--angles", type=_positive_int, default=256,
                   help="support angles (default 256)")
    p.add_argument("--slack", type=_positive_float, default=1e-7,
                   help="containment slack (default 1e-7)")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = add("ritt", "power profile n||T^n(I-T)|| and resolvent constants", _cmd_ritt)
    p.add_argument("--instance", required=True, help="instance file")
    p.add_argument("--n-max", type=_positive_int, default=500, help="powers (default 500)")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = add("fracpow", "decay slopes of (I-T)^alpha starts", _cmd_fracpow)
    p.add_argument("--instance", required=True, help="instance file")
    p.add_argument("--alpha", type=_alpha_list, default=[0.5, 1.0, 2.0],
                   help="comma-separated exponents (default 0.5,1,2)")
    p.add_argument("--n-max", type=_positive_int, default=1000, help="sweeps (default 1000)")
    p.add_argument("--seed", required=True, type=int, help="seed for the y, z draws")
    p.add_argument("--tol", type=_positive_float, default=1e-10,
                   help="fractional-power truncation tolerance (default 1e-10)")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = add("slowvec", "construct a slow vector for targets 1/log(n+2)", _cmd_slowvec)
    p.add_argument("--instance", required=True, help="block_aligned instance file")
    p.add_argument("--n-max", type=_positive_int, default=1000,
                   help="horizon (default 1000)")
    p.add_argument("--eps", type=_positive_float, default=0.1,
                   help="norm budget factor 1+eps (default 0.1)")
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = add("suite", "run the acceptance battery (exit 3 on any failure)", _cmd_suite)
    p.add_argument("--criteria", type=_criteria_list, default=None,
                   help="comma-separated criterion ids (default: all)")
    p.add_argument("--out", help="summary CSV output path")

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalContractError as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return 3
    except CapacityError as exc:
        print(f"capacity limit: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
