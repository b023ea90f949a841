"""Command-line entry point ``divcorr``.

Every subcommand writes one JSON document ``{"command", "params", "result"}``
(validated against :func:`divcorr.report.schema_for`) or its CSV rendering.

Exit status: 0 on success, 2 on parameter errors, 3 on resource errors.
"""

from __future__ import annotations

import argparse
import sys

from . import report
from .asymptotics import (
    EulerValue,
    lambda_h0,
    landau_ramanujan_b0,
    omega_leading_coefficient,
    titchmarsh_constants,
    two_squares_b,
    two_squares_coeff,
)
from .arith import build_factor_table
from .characters import character_group
from .correlations import (
    CharacterPool,
    correlation_by_omega_all,
    correlation_report,
    main_term_detail,
    sigma_f,
    xi_polynomial,
)
from .divisor import (
    ClassOmega,
    FunctionSpec,
    TauZ,
    TauZTwisted,
    TwoSquaresIndicator,
    ZPowOmega,
    is_rational,
    parse_z,
    sieve_multiplicative,
)
from .errors import DomainError, ModeError, ResourceError
from .identities import (
    FriableClass,
    friable_decomposition_report,
    friable_factorize,
    hb_b_coefficients,
    hb_verify,
    linnik_coefficients,
    linnik_verify,
)
from .parallel import default_threads

EXIT_OK, EXIT_PARAM, EXIT_RESOURCE = 0, 2, 3

FUNCTIONS = ("tau-z", "tau-z-chi", "mobius", "z-pow-omega", "two-squares", "class-omega")
CONSTANTS = ("titchmarsh", "titchmarsh-prime", "lambda", "two-squares", "two-squares-b",
             "landau-ramanujan", "omega-leading")


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _common(p: argparse.ArgumentParser, mode_default=None) -> None:
    p.add_argument("--mode", choices=("float", "exact"), default=mode_default)
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=_positive, default=None)
    p.add_argument("--out", default=None, help="write to this path instead of stdout")


def _function_args(p: argparse.ArgumentParser, z_default: str) -> None:
    p.add_argument("--f", choices=FUNCTIONS, default="tau-z")
    p.add_argument("--z", default=z_default)
    p.add_argument("--q", type=_positive, default=1, help="character modulus for tau-z-chi")
    p.add_argument("--chi", type=int, default=0, help="character index inside the group mod q")
    p.add_argument("--zvec", default=None, help="class-omega values as 'r:z,r:z,...'")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="divcorr", description="Generalized divisor functions and their shifted convolutions.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sieve", help="tabulate a multiplicative function")
    _function_args(p, "2")
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--D", type=_positive, default=1)
    p.add_argument("--table-out", default=None, help="also write the binary table file")
    _common(p)

    p = sub.add_parser("identity-hb", help="verify the Heath-Brown type identity")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--K", type=_positive, required=True)
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    _common(p, "exact")

    p = sub.add_parser("identity-linnik", help="verify the Linnik type identity")
    _function_args(p, "1/2")
    p.add_argument("--f-z", dest="fz", default="1", help="z of the base function f (tau-z kinds)")
    p.add_argument("--K", type=_positive, required=True)
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--D", type=_positive, default=1)
    _common(p)

    p = sub.add_parser("friable", help="classify friable integers")
    _function_args(p, "1")
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--n", type=_positive, default=None, help="also classify this single n")
    p.add_argument("--D", type=_positive, default=1)
    _common(p)

    for name, help_ in (("correlate", "shifted convolution sum with main term"),
                        ("main-term", "explicit main term with per-character partials")):
        p = sub.add_parser(name, help=help_)
        _function_args(p, "1")
        p.add_argument("--x", type=_positive, required=True)
        p.add_argument("--a", type=_positive, default=1)
        p.add_argument("--h", type=int, default=1)
        p.add_argument("--D", type=_positive, default=1)
        if name == "correlate":
            p.add_argument("--R", type=_positive, default=None)
            p.add_argument("--lo", type=int, default=None)
            p.add_argument("--hi", type=int, default=None)
        _common(p)

    p = sub.add_parser("sigma-scan", help="kernel discrepancy over an interval for several R")
    _function_args(p, "-1")
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--a", type=_positive, default=1)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--R", default="2,4,8,16", help="comma separated conductor bounds")
    p.add_argument("--lo", type=int, default=None)
    p.add_argument("--hi", type=int, default=None)
    p.add_argument("--D", type=_positive, default=1)
    _common(p, "float")

    p = sub.add_parser("omega-correlate", help="sums restricted to omega(n) = k")
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--z", default=None, help="comma separated z values for Xi_{x,h}(z)")
    _common(p)

    p = sub.add_parser("constants", help="leading asymptotic constants")
    p.add_argument("--name", choices=CONSTANTS, required=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--P", type=_positive, default=100_000)
    p.add_argument("--z", default="1")
    p.add_argument("--k", type=_positive, default=1)
    _common(p)
    return ap


# --------------------------------------------------------------------------
# helpers


def _parse_zvec(text: str | None):
    if not text:
        raise DomainError("class-omega needs --zvec 'r:z,...'")
    out = {}
    for item in text.split(","):
        if ":" not in item:
            raise DomainError(f"malformed --zvec entry {item!r}")
        r, z = item.split(":", 1)
        out[int(r)] = parse_z(z)
    return out


def build_function(kind: str, z_text: str, args) -> FunctionSpec:
    """Translate ``--f`` and its companions into a :class:`FunctionSpec`."""
    if kind == "tau-z":
        return TauZ(parse_z(z_text))
    if kind == "mobius":
        return TauZ(-1)
    if kind == "tau-z-chi":
        group = character_group(args.q)
        if not 0 <= args.chi < len(group):
            raise DomainError(f"--chi must be in [0, {len(group)}) for q={args.q}")
        return TauZTwisted(parse_z(z_text), group[args.chi])
    if kind == "z-pow-omega":
        return ZPowOmega(parse_z(z_text))
    if kind == "two-squares":
        return TwoSquaresIndicator()
    if kind == "class-omega":
        return ClassOmega(args.D, _parse_zvec(args.zvec))
    raise DomainError(f"unknown function kind {kind!r}")


def _auto_mode(spec: FunctionSpec, mode: str | None) -> str:
    if mode is None:
        return "exact" if spec.rational() else "float"
    if mode == "exact" and not spec.rational():
        raise ModeError("exact mode requires rational parameters and real characters")
    return mode


def _scalar(v):
    return report.render_scalar(v)


def _params(args, skip=("command", "output", "out", "threads", "table_out")) -> dict:
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def _euler(name: str, ev: EulerValue) -> dict:
    return {
        "name": name,
        "value": _scalar(ev.value),
        "prime_cutoff": ev.prime_cutoff,
        "tail_bound": float(ev.tail_bound),
        "error_bound": float(ev.error_bound),
    }


# --------------------------------------------------------------------------
# commands


def cmd_sieve(args) -> dict:
    spec = build_function(args.f, args.z, args)
    mode = _auto_mode(spec, args.mode)
    t = sieve_multiplicative(spec, args.x, None, mode)
    if args.table_out:
        report.save_table(t, args.table_out)
    return report.table_document(t)


def _identity_result(rep, coeffs) -> dict:
    return {
        "x": rep.x,
        "mode": rep.mode,
        "max_abs_deviation": _scalar(rep.max_abs_deviation),
        "worst_n": rep.worst_n,
        "terms_evaluated": rep.terms_evaluated,
        "coefficients": [_scalar(c) for c in coeffs],
    }


def cmd_identity_hb(args) -> dict:
    rep = hb_verify(args.r, args.u, args.v, args.K, args.x, args.mode, args.sign)
    N = 0 if args.sign > 0 else args.r - 1
    return _identity_result(rep, [-b for b in hb_b_coefficients(args.K, N, args.u, args.v)])


def cmd_identity_linnik(args) -> dict:
    z = parse_z(args.z)
    base = build_function(args.f, args.fz, args)
    mode = args.mode
    if mode is None:
        mode = "exact" if is_rational(z) and base.rational() else "float"
    elif mode == "exact" and not (is_rational(z) and base.rational()):
        raise ModeError("exact mode requires rational z and a rational base function")
    rep = linnik_verify(base, z, args.K, args.x, mode)
    return _identity_result(rep, linnik_coefficients(z, args.K))


def cmd_friable(args) -> dict:
    spec = build_function(args.f, args.z, args)
    mode = _auto_mode(spec, args.mode)
    table = build_factor_table(max(args.x, 2))
    f = sieve_multiplicative(spec, args.x, table, mode)
    g = [0] + [1] * args.x
    rep = friable_decomposition_report(f, g, args.y, args.w, args.x, table)
    out = {
        "sum_total": _scalar(rep.sum_total),
        "sum_I": _scalar(rep.sum_I),
        "sum_triv": _scalar(rep.sum_triv),
        "residual": _scalar(rep.residual),
        "split_mass": _scalar(rep.split_mass),
        "split_count": rep.split_count,
        "classification": None,
        "split": None,
    }
    if args.n is not None:
        if args.n > args.x:
            raise DomainError("--n must be <= --x")
        cls = friable_factorize(args.n, args.y, args.w, table)
        if isinstance(cls, FriableClass):
            out["classification"] = cls.value
        else:
            out["classification"] = "Split"
            out["split"] = [cls.n1, cls.n2]
    return out


def cmd_correlate(args) -> dict:
    spec = build_function(args.f, args.z, args)
    mode = _auto_mode(spec, args.mode)
    interval = None
    if args.R is not None:
        lo = args.lo if args.lo is not None else args.x // 2
        hi = args.hi if args.hi is not None else args.x
        interval = (lo, hi)
    rep = correlation_report(spec, args.x, args.a, args.h, args.D, args.R, interval, mode, args.threads)
    return {
        "d_value": _scalar(rep.d_value),
        "m_value": _scalar(rep.m_value),
        "sigma_value": _scalar(rep.sigma_value) if rep.sigma_value is not None else None,
        "normalized_gap": rep.normalized_gap,
        "partials": {k: _scalar(v) for k, v in rep.partials.items()},
    }


def cmd_main_term(args) -> dict:
    spec = build_function(args.f, args.z, args)
    mode = _auto_mode(spec, args.mode)
    mt = main_term_detail(spec, args.x, args.a, args.h, args.D, mode=mode, threads=args.threads)
    return {"m_value": _scalar(mt.value), "partials": {k: _scalar(v) for k, v in mt.partials.items()}}


def cmd_sigma_scan(args) -> dict:
    spec = build_function(args.f, args.z, args)
    try:
        Rs = [int(r) for r in args.R.split(",") if r.strip()]
    except ValueError as exc:
        raise DomainError(f"malformed --R list {args.R!r}") from exc
    if not Rs or min(Rs) < 1:
        raise DomainError("--R needs positive integers")
    lo = args.lo if args.lo is not None else args.x // 2
    hi = args.hi if args.hi is not None else args.x
    table = build_factor_table(max(args.a * hi + abs(args.h), hi, 2))
    f = sieve_multiplicative(spec, hi, table, "float")
    rows = []
    for R in Rs:
        s = sigma_f(f, lo, hi, args.a, args.h, R, table, CharacterPool(R), args.threads)
        rows.append({"R": R, "sigma_value": _scalar(s), "abs_over_x": abs(s) / args.x})
    return {"rows": rows}


def cmd_omega_correlate(args) -> dict:
    table = build_factor_table(max(args.x + abs(args.h), 2))
    rows = []
    per_k = correlation_by_omega_all(args.x, args.h, table)
    if args.k is not None:
        if args.k < 0:
            raise DomainError("--k must be >= 0")
        per_k = {args.k: per_k.get(args.k, 0)}
    for k, v in sorted(per_k.items()):
        rows.append({"kind": "omega", "k": k, "value": _scalar(v)})
    if args.z:
        for text in args.z.split(","):
            rows.append({"kind": "xi", "z": text.strip(), "value": _scalar(xi_polynomial(args.x, args.h, parse_z(text), table))})
    return {"rows": rows}


def cmd_constants(args) -> dict:
    name = args.name
    if name == "titchmarsh":
        return _euler(name, titchmarsh_constants(args.h, args.P)[0])
    if name == "titchmarsh-prime":
        return _euler(name, titchmarsh_constants(args.h, args.P)[1])
    if name == "lambda":
        return _euler(name, lambda_h0(parse_z(args.z), args.h, args.P))
    if name == "two-squares":
        return _euler(name, two_squares_coeff(args.h, args.P))
    if name == "two-squares-b":
        return _euler(name, two_squares_b(args.h, args.P))
    if name == "landau-ramanujan":
        return _euler(name, landau_ramanujan_b0(args.P))
    return _euler(name, omega_leading_coefficient(args.k, args.h, args.P))


COMMANDS = {
    "sieve": cmd_sieve,
    "identity-hb": cmd_identity_hb,
    "identity-linnik": cmd_identity_linnik,
    "friable": cmd_friable,
    "correlate": cmd_correlate,
    "main-term": cmd_main_term,
    "sigma-scan": cmd_sigma_scan,
    "omega-correlate": cmd_omega_correlate,
    "constants": cmd_constants,
}


VALUE_FLAGS = ("--z", "--f-z", "--zvec", "--h", "--r", "--u", "--v", "--k", "--chi", "--lo", "--hi", "--y", "--w", "--sign")


def _attach_negative_values(argv: list[str]) -> list[str]:
    # "--z -1/2" would otherwise be read as an unknown flag
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    """Parse and execute.

    Returns:
        ``(exit status, rendered output or one-line diagnostic, output path)``.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as exc:
        return int(exc.code or 0), "", None
    if args.threads is None:
        args.threads = default_threads()
    try:
        result = COMMANDS[args.command](args)
        doc = {"command": args.command, "params": _params(args), "result": result}
        report.validate(doc)
        text = report.dumps(doc) if args.output == "json" else report.to_csv(doc)
    except (DomainError, ModeError, ValueError) as exc:
        return EXIT_PARAM, f"divcorr: error: {exc}", None
    except (ResourceError, MemoryError) as exc:
        return EXIT_RESOURCE, f"divcorr: resource error: {exc}", None
    return EXIT_OK, text, args.out


def main(argv: list[str] | None = None) -> int:
    code, text, out = run(argv)
    if code != EXIT_OK:
        if text:
            print(text.splitlines()[0], file=sys.stderr)
        return code
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
