"""Command line interface.

Subcommands
-----------
gen         write a fresh instance JSON of a given kind
verify      run verification suites on an instance (exit 0 pass / 1 fail)
sample      evaluate a function on a grid and write CSV (optionally PNG)
kms         eval / verify shortcuts for KMS instances
rpext       build / verify / sample shortcuts for extensions
gns         verify shortcut for finite-group instances
resolvent   check the resolvent-space model for given parameters

Exit codes: 0 success, 1 a verification check failed, 2 malformed
input (bad instance file, grid, or parameters).
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import gns as gnsmod
from . import kms as kmsmod
from . import rpext, verify
from .serialize import (MalformedInstanceError, load_instance,
                        matrix_from_json, matrix_to_json, save_instance)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BAD_INPUT = 2


def parse_grid(text, beta=None):
    """Parse 'a:b:step' into a numpy grid; 'b' tokens mean beta."""

    def num(tok):
        tok = tok.strip()
        if beta is not None and tok.endswith("b"):
            head = tok[:-1]
            return (float(head) if head not in ("", "+", "-")
                    else float(head + "1")) * beta
        return float(tok)

    try:
        a, b, step = (num(t) for t in text.split(":"))
    except (ValueError, AttributeError) as exc:
        raise MalformedInstanceError(f"bad grid {text!r}: {exc}") from exc
    if step <= 0 or b < a:
        raise MalformedInstanceError(f"bad grid {text!r}")
    return np.arange(a, b + step / 2.0, step)


def parse_complex(s):
    try:
        return complex(s.strip().replace("i", "j"))
    except ValueError as exc:
        raise MalformedInstanceError(f"bad complex number {s!r}") from exc


def parse_scalar(s):
    """Float literal, or a one-argument math call like 'tanh(0.5)'."""
    s = s.strip()
    try:
        return float(s)
    except ValueError:
        pass
    if "(" in s and s.endswith(")"):
        fn, arg = s[:-1].split("(", 1)
        if fn in ("tanh", "exp", "log", "sqrt", "sin", "cos"):
            try:
                return getattr(math, fn)(float(arg))
            except ValueError as exc:
                raise MalformedInstanceError(
                    f"bad scalar {s!r}") from exc
    raise MalformedInstanceError(f"bad scalar {s!r}")


def _random_skew(rng, n, norm):
    A = rng.normal(size=(n, n))
    S = A - A.T
    s = np.linalg.norm(S, 2)
    return S * (norm / s) if s > 0 else S


def _rot_block(c, n):
    """Block-diagonal c * [[0,-1],[1,0]] on even dimension n."""
    if n % 2:
        raise MalformedInstanceError("rotation contraction needs even dim")
    C = np.zeros((n, n))
    for k in range(0, n, 2):
        C[k, k + 1] = -c
        C[k + 1, k] = c
    return C


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    kind = args.kind
    if kind == "contraction":
        if args.dim < 1:
            raise MalformedInstanceError("dim must be >= 1")
        norm = (args.strictness if args.strictness is not None
                else rng.uniform(0.5, 0.95))
        C = (_rot_block(parse_scalar(args.c), args.dim)
             if args.c is not None else _random_skew(rng, args.dim, norm))
        payload = {"C": matrix_to_json(C)}
    elif kind == "kms":
        if args.dim < 2:
            raise MalformedInstanceError("kms instances need dim >= 2")
        norm = (args.strictness if args.strictness is not None
                else rng.uniform(0.5, 0.9))
        C = (_rot_block(parse_scalar(args.c), args.dim)
             if args.c is not None else _random_skew(rng, args.dim, norm))
        payload = {"beta": args.beta, "C": matrix_to_json(C)}
        if args.corrupt is not None:
            payload["corrupt_atom"] = {"index": 0, "factor": args.corrupt}
    elif kind == "rpfunction":
        norm = (args.strictness if args.strictness is not None
                else rng.uniform(0.5, 0.9))
        C = (_rot_block(parse_scalar(args.c), args.dim)
             if args.c is not None else _random_skew(rng, args.dim, norm))
        k = verify.kms_from_payload(
            {"beta": args.beta, "C": matrix_to_json(C)})
        f = rpext.build_extension(k)
        payload = {"beta": f.beta, "I": matrix_to_json(f.I),
                   "absD": matrix_to_json(f.absD)}
    elif kind == "finite-group":
        if args.params:
            params = [parse_scalar(p) for p in args.params.split(",")]
        else:
            # order the draws so the sampled instance is theta-positive
            # (|c| <= |a| and |d| <= |b|)
            a, c = sorted(rng.uniform(0.2, 2.0, 2), reverse=True)
            b, d = sorted(rng.uniform(0.2, 2.0, 2), reverse=True)
            params = [a, b, c, d]
        if len(params) != 4:
            raise MalformedInstanceError(
                "finite-group gen takes 4 parameters a,b,c,d")
        a, b, c, d = params
        rep = rpext.klein4_analysis(a, b, c, d)
        doubled = gnsmod.klein_four()
        order = ("1", "sigma", "tau", "sigma_tau")
        payload = {
            "table": doubled.base.table.tolist(),
            "tau": doubled.tau.tolist(),
            "values": [matrix_to_json(np.array([[rep["f"][g]]]))
                       for g in order],
            "plus": [0],
            "klein4_params": [[float(p), 0.0] for p in params],
        }
    elif kind == "resolvent":
        payload = {"beta": args.beta, "lambda": args.lam, "m": 2,
                   "I": matrix_to_json(_rot_block(1.0, 2))}
    else:  # pragma: no cover - argparse restricts choices
        raise MalformedInstanceError(f"unknown kind {kind!r}")
    save_instance(args.out, kind, payload)
    print(f"wrote {kind} instance to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _report(checks, tol_override=None, json_path=None):
    worst = EXIT_OK
    if json_path:
        with open(json_path, "w") as fh:
            json.dump({"checks": [
                {"name": c["name"],
                 "value": (c["value"] if isinstance(c["value"], (int, float))
                           else bool(c["value"])),
                 "tol": c["tol"], "passed": c["passed"]}
                for c in checks]}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    for c in checks:
        passed = c["passed"]
        if tol_override is not None and c["tol"] is not None:
            passed = c["value"] <= tol_override
        status = "PASS" if passed else "FAIL"
        if c["tol"] is not None:
            print(f"{status}  {c['name']}: {c['value']:.3e}"
                  f" (tol {tol_override or c['tol']:.1e})")
        else:
            print(f"{status}  {c['name']}: {c['value']}")
        if not passed:
            worst = EXIT_FAIL
    return worst


def cmd_verify(args, suites=None):
    kind, payload = load_instance(args.instance)
    grid = None
    if getattr(args, "grid", None):
        beta = payload.get("beta")
        grid = parse_grid(args.grid, beta=beta)
    suites = suites or getattr(args, "suite", None) or ["all"]
    if isinstance(suites, str):
        suites = [suites]
    if grid is not None and kind == "kms" and ("kms" in suites
                                               or "all" in suites):
        checks = verify.suite_kms(payload, grid=grid)
        if "all" in suites:
            checks += verify.suite_rp(kind, payload)
    else:
        checks = verify.run_suites(kind, payload, suites)
    return _report(checks, getattr(args, "tol", None),
                   getattr(args, "json", None))


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def _entry_headers(m, complex_part=True):
    cols = []
    for i in range(m):
        for j in range(m):
            cols.append(f"re_{i}{j}")
            if complex_part:
                cols.append(f"im_{i}{j}")
    return cols


def cmd_sample(args):
    what = args.what
    if what in ("u+", "u-"):
        # standalone scalar sampling; no instance file needed
        beta, lam = args.beta, args.lam
        if not (beta > 0 and lam > 0):
            raise MalformedInstanceError("u± sampling needs beta, lambda > 0")
        grid = parse_grid(args.grid, beta=beta)
        fn = rpext.u_plus if what == "u+" else rpext.u_minus
        rows = [[float(t), float(fn(lam, beta, float(t))), 0.0]
                for t in grid]
        _write_csv(args.csv, ["t", "re_00", "im_00"], rows)
        print(f"wrote {len(rows)} rows to {args.csv}")
        if args.plot:
            from .plotting import render_series
            png = args.csv.rsplit(".", 1)[0] + ".png"
            arr = np.asarray(rows)
            render_series(arr[:, 0], {what: arr[:, 1]}, png, title=what)
            print(f"wrote figure to {png}")
        return EXIT_OK
    if not args.instance:
        raise MalformedInstanceError(f"sampling {what!r} needs --instance")
    kind, payload = load_instance(args.instance)
    if kind == "kms" and what in ("psi", "phi"):
        k = verify.kms_from_payload(payload)
        grid = parse_grid(args.grid, beta=k.beta)
        rows, series = [], {}
        for t in grid:
            F = (kmsmod.psi_eval(k, t) if what == "psi"
                 else kmsmod.phi_periodic_extend(k, t))
            row = [float(t)]
            for i in range(k.m):
                for j in range(k.m):
                    row += [float(F[i, j].real), float(F[i, j].imag)]
            rows.append(row)
        header = ["t"] + _entry_headers(k.m)
        m = k.m
    elif kind in ("rpfunction", "kms") and what in ("f", "fsharp"):
        f = verify.rp_from_payload(kind, payload)
        grid = parse_grid(args.grid, beta=f.beta)
        rows = []
        dim = f.m if what == "f" else 2 * f.m
        for eps in (0, 1):
            for t in grid:
                F = (rpext.f_eval(f, rpext.RTau(float(t), eps))
                     if what == "f"
                     else rpext.f_sharp(f, rpext.RTau(float(t), eps)))
                row = [float(t), eps]
                for i in range(dim):
                    for j in range(dim):
                        row += [float(F[i, j].real), float(F[i, j].imag)]
                rows.append(row)
        header = ["t", "eps"] + _entry_headers(dim)
        m = dim
    else:
        raise MalformedInstanceError(
            f"cannot sample {what!r} from a {kind!r} instance")
    _write_csv(args.csv, header, rows)
    print(f"wrote {len(rows)} rows to {args.csv}")
    if args.plot:
        from .plotting import render_series
        png = args.csv.rsplit(".", 1)[0] + ".png"
        arr = np.asarray(rows, dtype=float)
        toff = 1 if header[1] == "eps" else 0
        diag = {}
        for i in range(min(m, 4)):
            col = 1 + toff + 2 * (i * m + i)
            label = f"{what}[{i},{i}]"
            if toff:
                sel = arr[:, 1] == 0
                diag[label] = arr[sel, col]
                ts = arr[sel, 0]
            else:
                diag[label] = arr[:, col]
                ts = arr[:, 0]
        render_series(ts, diag, png, title=what)
        print(f"wrote figure to {png}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# shortcuts
# ---------------------------------------------------------------------------

def cmd_kms_eval(args):
    _, payload = load_instance(args.instance)
    k = verify.kms_from_payload(payload)
    z = parse_complex(args.z)
    try:
        F = kmsmod.psi_eval(k, z)
    except kmsmod.OutOfStripError as exc:
        raise MalformedInstanceError(str(exc)) from exc
    print(json.dumps(matrix_to_json(F), sort_keys=True))
    return EXIT_OK


def cmd_rpext_build(args):
    _, payload = load_instance(args.kms)
    f = rpext.build_extension(verify.kms_from_payload(payload))
    save_instance(args.out, "rpfunction", {
        "beta": f.beta, "I": matrix_to_json(f.I),
        "absD": matrix_to_json(f.absD)})
    print(f"wrote rpfunction instance to {args.out}")
    return EXIT_OK


def cmd_resolvent_check(args):
    payload = {"beta": args.beta, "lambda": args.lam, "m": 2,
               "I": matrix_to_json(_rot_block(1.0, 2))}
    checks = verify.suite_resolvent(payload, nmax=args.nmax)
    return _report(checks, args.tol)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="kmsrp",
        description="KMS functions, reflection positive extensions, and "
                    "their finite-dimensional verification suites.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("kind", choices=("contraction", "kms", "rpfunction",
                                    "finite-group", "resolvent"))
    g.add_argument("-o", "--out", required=True)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--beta", type=float, default=1.0)
    g.add_argument("--lambda", dest="lam", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--c", default=None,
                   help="rotation-block contraction strength, e.g. tanh(0.5)")
    g.add_argument("--strictness", type=float, default=None,
                   help="target operator norm of the random contraction")
    g.add_argument("--params", default=None,
                   help="a,b,c,d for finite-group instances")
    g.add_argument("--corrupt", type=float, default=None,
                   help="scale atom 0 of the kms measure (negative control)")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--instance", required=True)
    v.add_argument("--suite", action="append",
                   choices=("modular", "kms", "rp", "gns", "resolvent",
                            "all"))
    v.add_argument("--grid", default=None)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--json", default=None,
                   help="also write a machine-readable report")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="sample a function to CSV")
    s.add_argument("--instance", default=None)
    s.add_argument("--what", default="f",
                   choices=("psi", "phi", "f", "fsharp", "u+", "u-"))
    s.add_argument("--grid", required=True)
    s.add_argument("--csv", required=True)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--plot", action="store_true",
                   help="also render a PNG next to the CSV")
    s.set_defaults(func=cmd_sample)

    km = sub.add_parser("kms", help="KMS-function shortcuts")
    ksub = km.add_subparsers(dest="kms_command", required=True)
    ke = ksub.add_parser("eval")
    ke.add_argument("--instance", required=True)
    ke.add_argument("--z", required=True)
    ke.set_defaults(func=cmd_kms_eval)
    kv = ksub.add_parser("verify")
    kv.add_argument("--instance", required=True)
    kv.add_argument("--grid", default=None)
    kv.add_argument("--tol", type=float, default=None)
    kv.set_defaults(func=lambda a: cmd_verify(a, suites=["kms"]))

    rp = sub.add_parser("rpext", help="extension shortcuts")
    rsub = rp.add_subparsers(dest="rp_command", required=True)
    rb = rsub.add_parser("build")
    rb.add_argument("--kms", required=True)
    rb.add_argument("-o", "--out", required=True)
    rb.set_defaults(func=cmd_rpext_build)
    rv = rsub.add_parser("verify")
    rv.add_argument("instance")
    rv.add_argument("--suite", action="append",
                    choices=("rp", "kms", "all"))
    rv.add_argument("--grid", default=None)
    rv.add_argument("--tol", type=float, default=None)
    rv.set_defaults(func=cmd_verify)
    rs = rsub.add_parser("sample")
    rs.add_argument("instance")
    rs.add_argument("--what", default="f", choices=("f", "fsharp"))
    rs.add_argument("--grid", required=True)
    rs.add_argument("--csv", required=True)
    rs.add_argument("--plot", action="store_true")
    rs.set_defaults(func=cmd_sample)

    gn = sub.add_parser("gns", help="finite-group shortcuts")
    gsub = gn.add_subparsers(dest="gns_command", required=True)
    gv = gsub.add_parser("verify")
    gv.add_argument("--instance", required=True)
    gv.add_argument("--tol", type=float, default=None)
    gv.set_defaults(func=lambda a: cmd_verify(a, suites=["gns"]))

    rc = sub.add_parser("resolvent", help="resolvent-space shortcuts")
    csub = rc.add_subparsers(dest="res_command", required=True)
    cc = csub.add_parser("check")
    cc.add_argument("--beta", type=float, default=1.0)
    cc.add_argument("--lambda", dest="lam", type=float, default=1.0)
    cc.add_argument("--nmax", type=int, default=2000)
    cc.add_argument("--tol", type=float, default=None)
    cc.set_defaults(func=cmd_resolvent_check)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MalformedInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
