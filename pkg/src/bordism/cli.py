"""Batch command-line front end.

Exit status: 0 on success or a realizable verdict, 1 on a certified negative
verdict (or catalog failures), 2 on usage, parse or precision errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .borel import Weight, euler_class
from .errors import BordismError, ParseError, PrecisionError
from .fixedring import antipode
from .geometry import CatalogBounds, phi_omega
from .lazard import MAX_DEGREE_ENV, RingContext, express_in_aij, formal_inverse, make_context, n_series
from .mu import MuElement, format_polynomial
from .realizability import localize, realizable, verify_catalog
from .series import PowerSeries
from .syntax import parse_fixed, parse_manifold

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2

LIMITS = {"r": (1, 3), "N": (1, 12), "D": (0, 10)}


def _env_limit() -> int | None:
    raw = os.environ.get(MAX_DEGREE_ENV)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        return None


def check_limits(args) -> None:
    """Enforce the default ranges unless the user acknowledged larger runs."""
    if args.allow_large:
        return
    env = _env_limit()
    for name, (lo, hi) in LIMITS.items():
        val = getattr(args, name, None)
        if val is None:
            continue
        if name in ("N", "D") and env is not None:
            hi = max(hi, env)
        if not lo <= val <= hi:
            raise UsageError(
                f"--{name} {val} is outside [{lo}, {hi}]; pass --allow-large "
                f"or set {MAX_DEGREE_ENV} to go beyond"
            )


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# rendering


def _aij_name(mono) -> str:
    counts: dict = {}
    for pair in mono:
        counts[pair] = counts.get(pair, 0) + 1
    return "*".join((f"a({i},{j})" if k == 1 else f"a({i},{j})^{k}") for (i, j), k in sorted(counts.items()))


def coef_renderer(ctx: RingContext, basis: str):
    if basis == "mischenko":
        return str

    def render(c: MuElement) -> str:
        coords = express_in_aij(ctx, c)
        items = sorted(coords.items(), key=lambda kv: (sum(i + j - 1 for i, j in kv[0]), kv[0]))
        return format_polynomial(items, _aij_name)

    return render


def _emit(args, text: str, obj) -> None:
    if args.output == "json":
        print(json.dumps(obj, indent=2, sort_keys=False))
    else:
        print(text)


# ---------------------------------------------------------------------------
# input


def read_input(args) -> str:
    if args.expr is not None:
        return args.expr
    if args.file is not None:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from exc
    if sys.stdin is None or sys.stdin.isatty():
        raise UsageError("no input: use --expr, --file, or pipe an expression on stdin")
    return sys.stdin.read()


def _context(args) -> RingContext:
    limit = None
    if args.allow_large:
        limit = max(args.N, 1)
    return make_context(args.N, max_N=limit)


# ---------------------------------------------------------------------------
# commands


def cmd_fgl(args) -> int:
    ctx = _context(args)
    render = coef_renderer(ctx, args.basis)
    D = args.D
    a = {(i, j): ctx.a(i, j) for d in range(1, D) for i in range(1, d + 1) for j in [d + 1 - i] if i + j <= D}
    x = PowerSeries.var(0, 1, D)
    ns = n_series(ctx, args.n, x)
    inv = formal_inverse(ctx, x)
    terms = ["x", "y"]
    for (i, j), c in sorted(a.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0])):
        if not c:
            continue
        mono = ("x" if i == 1 else f"x^{i}") + "*" + ("y" if j == 1 else f"y^{j}")
        cs = render(c)
        terms.append(f"{mono}" if cs == "1" else f"({cs})*{mono}")
    text = "\n".join(
        [
            "F(x,y) = " + " + ".join(terms) + f" + O(deg {D + 1})",
            f"[{args.n}](x) = {ns.to_str(render)}",
            f"inverse(x) = {inv.to_str(render)}",
        ]
    )
    obj = {
        "N": args.N,
        "D": D,
        "a": {f"({i},{j})": c.to_json() for (i, j), c in sorted(a.items())},
        "n": args.n,
        "n_series": ns.to_json(),
        "inverse": inv.to_json(),
    }
    _emit(args, text, obj)
    return EXIT_OK


def cmd_euler(args) -> int:
    ctx = _context(args)
    raw = args.weight if args.weight is not None else read_input(args).strip()
    w = Weight.parse(json.loads(raw) if raw.startswith("[") else raw)
    if w.rank != args.r:
        raise UsageError(f"weight {w} has rank {w.rank}, but --r is {args.r}")
    e = euler_class(ctx, w, args.D)
    _emit(args, f"e{w} = {e.to_str(coef_renderer(ctx, args.basis))}", {"weight": str(w), "euler": e.to_json()})
    return EXIT_OK


def cmd_phi(args) -> int:
    m = parse_manifold(read_input(args), args.input)
    r = m.rank() if m.rank() is not None else args.r
    x = phi_omega(m, r)
    text = x.to_str()
    if args.basis != "mischenko":
        text = x.to_str(coef_renderer(_context(args), args.basis))
    _emit(args, text, x.to_json())
    return EXIT_OK


def cmd_antipode(args) -> int:
    x = parse_fixed(read_input(args), args.input, rank=args.r)
    y = antipode(x)
    text = y.to_str() if args.basis == "mischenko" else y.to_str(coef_renderer(_context(args), args.basis))
    _emit(args, text, y.to_json())
    return EXIT_OK


def cmd_localize(args) -> int:
    ctx = _context(args)
    x = parse_fixed(read_input(args), args.input, rank=args.r)
    loc = localize(ctx, x, args.D)
    _emit(args, loc.to_str(coef_renderer(ctx, args.basis)), loc.to_json())
    return EXIT_OK


def _verdict_text(v, render) -> str:
    lines = []
    if v.realizable:
        lines.append(f"realizable: no obstruction through C-degree {v.precision} (truncation-bounded claim)")
    else:
        lines.append("not realizable (certified)")
    lines.append(f"cone: {'ok' if v.cone_ok else 'fail (positive Euler exponent)'}")
    integ = v.integrality
    if integ.ok:
        lines.append(f"integrality: pass through C-degree {integ.precision}")
    else:
        w = integ.witness
        mono = "*".join(f"C{i + 1}^{k}" if k > 1 else f"C{i + 1}" for i, k in enumerate(w.monomial or ()) if k) or "1"
        lines.append(
            f"integrality: fail ({w.kind} at C-degree {w.c_degree}, monomial {mono}, value {render(w.value)})"
        )
    ct = v.constant_term
    if ct is not None:
        lines.append(f"constant term: {render(ct)}")
    for c in v.components:
        lines.append(f"  degree {c.degree}: {'realizable' if c.realizable else 'not realizable'}")
    return "\n".join(lines)


def cmd_realizable(args) -> int:
    ctx = _context(args)
    x = parse_fixed(read_input(args), args.input, rank=args.r)
    if not x.is_homogeneous():
        print(f"warning: input is not homogeneous; judging degrees {sorted(x.degrees())} separately", file=sys.stderr)
    v = realizable(ctx, x, args.D)
    _emit(args, _verdict_text(v, coef_renderer(ctx, args.basis)), v.to_json())
    return EXIT_OK if v.realizable else EXIT_NEGATIVE


def cmd_verify_catalog(args) -> int:
    ctx = _context(args)
    rep = verify_catalog(ctx, args.r, args.D, CatalogBounds.default(args.r), workers=args.workers)
    c = rep.counts()
    lines = [
        f"catalog r={args.r} N={args.N} D={args.D}: {c['total']} manifolds",
        f"  cone:         {c['cone']}/{c['total']}",
        f"  integrality:  {c['integral']}/{c['total']}",
        f"  augmentation: {c['augmentation']}/{c['total']}",
        "PASS" if rep.ok else f"FAIL ({c['failures']} failures)",
    ]
    for f in rep.failures:
        lines.append(f"  failed: {f.expr}")
    _emit(args, "\n".join(lines), rep.to_json())
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


COMMANDS = {
    "fgl": (cmd_fgl, "print F(x,y), an n-series and the formal inverse"),
    "euler": (cmd_euler, "print the Borel Euler class of a weight"),
    "phi": (cmd_phi, "fixed-point data of a manifold expression"),
    "antipode": (cmd_antipode, "apply the involution to fixed-point data"),
    "localize": (cmd_localize, "localized Borel image of fixed-point data"),
    "realizable": (cmd_realizable, "decide realizability of fixed-point data"),
    "verify-catalog": (cmd_verify_catalog, "run the manifold catalog checks"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, default=1, help="torus rank (default 1)")
    common.add_argument("--N", type=int, default=6, help="coefficient half-degree (default 6)")
    common.add_argument("--D", type=int, default=5, help="Borel C-degree (default 5)")
    common.add_argument("--input", choices=["json", "sexpr"], default="json")
    common.add_argument("--output", choices=["text", "json"], default="text")
    common.add_argument("--basis", choices=["mischenko", "aij"], default="mischenko")
    common.add_argument("--allow-large", action="store_true", help="acknowledge runs beyond the default limits")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--expr", help="input expression")
    src.add_argument("--file", help="read the input expression from a file")

    parser = argparse.ArgumentParser(prog="bordism", description="Torus-equivariant bordism calculator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "fgl":
            p.add_argument("--n", type=int, default=2, help="which n-series to print")
        if name == "euler":
            p.add_argument("--weight", help="weight such as '(1,-2)'")
        if name == "verify-catalog":
            p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        check_limits(args)
        handler = COMMANDS[args.command][0]
        return handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        needed = f" (needs degree {exc.needed})" if getattr(exc, "needed", None) is not None else ""
        print(f"precision error: {exc}{needed}", file=sys.stderr)
        return EXIT_USAGE
    except (BordismError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
