"""Command-line front end: constant tables, verification suites, experiments.

Exit codes: 0 every check passed, 1 a check failed, 2 usage or domain
error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import exact_constants as ec
from .exact_constants import DomainError, render
from .quadrature import QuadratureConfig, QuadratureError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2, 3
PRECISION_ENV = "SHARPCONST_PRECISION_BITS"
SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    command: str
    scope: str
    N: int | None = None
    k: int | None = None
    m: int | None = None
    s: str | None = None
    alpha: str | None = None
    p: str | None = None
    eps: list = field(default_factory=list)
    beta_scale: float | None = None
    max_N: int | None = None
    max_m: int | None = None
    count: int | None = None
    seed: int = 0
    precision_bits: int = 53
    rel_tol: float = 1e-10
    assert_tol: float | None = None
    format: str = "json"

    @property
    def quad(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.rel_tol, precision_bits=self.precision_bits)


class Outcome:
    """Document to print plus an exit status."""

    def __init__(self, doc: dict, status: int, table=None, pretty=None, csv_text=None):
        self.doc, self.status, self.table, self.pretty, self.csv_text = doc, status, table, pretty, csv_text


def _frac_arg(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _eps_arg(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _need(cfg: RunConfig, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise DomainError(f"{cfg.command} {cfg.scope} requires " + ", ".join("--" + n.replace("_", "-") for n in missing))


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def _row(name, params, value):
    return {"name": name, "params": params, "exact": value.exact, "value": render(value),
            "float": float(value)}


def cmd_constants(cfg: RunConfig) -> Outcome:
    scope = cfg.scope
    rows = []
    if scope == "gamma":
        _need(cfg, "N", "alpha")
        a = Fraction(cfg.alpha)
        rows.append(_row("gamma", {"N": cfg.N, "alpha": str(a)}, ec.riesz_gamma(cfg.N, a)))
        rows.append(_row("gamma_tilde", {"N": cfg.N, "alpha": str(a)}, ec.riesz_gamma_tilde(cfg.N, a)))
    elif scope == "ell":
        _need(cfg, "N", "m")
        rows.append(_row("ell", {"N": cfg.N, "m": cfg.m}, ec.ell_constant(cfg.N, cfg.m)))
    elif scope == "lambda":
        _need(cfg, "N", "s", "m")
        rows.append(_row("lambda", {"N": cfg.N, "s": str(Fraction(cfg.s)), "m": cfg.m},
                         ec.lambda_constant(cfg.N, Fraction(cfg.s), cfg.m)))
    elif scope == "sharp":
        _need(cfg, "N", "k")
        rows.append(_row("c_k", {"N": cfg.N, "k": cfg.k}, ec.sharp_c(cfg.N, cfg.k)))
    elif scope == "adams":
        _need(cfg, "N", "m")
        rows.append(_row("beta_0", {"N": cfg.N, "m": cfg.m}, ec.adams_beta0(cfg.N, cfg.m)))
        rows.append(_row("beta_tilde_0", {"N": cfg.N, "m": cfg.m}, ec.beta_tilde(cfg.N, cfg.m)))
        if cfg.k is not None:
            rows.append(_row("beta_tilde_0_k", {"N": cfg.N, "m": cfg.m, "k": cfg.k},
                             ec.beta_tilde_k(cfg.N, cfg.m, cfg.k)))
    elif scope == "moser":
        _need(cfg, "N")
        rows.append(_row("alpha_0", {"N": cfg.N}, ec.moser_alpha0(cfg.N)))
    elif scope == "bmo":
        _need(cfg, "N")
        rows.append(_row("c_0", {"N": cfg.N}, ec.bmo_c0(cfg.N)))
    else:
        raise DomainError(f"unknown constants scope {scope!r}")
    doc = {"schema": SCHEMA_VERSION, "command": "constants", "scope": scope, "rows": rows}
    pretty = "\n".join(f"{r['name']} {r['params']}: {r['value']}  ({r['float']!r})" for r in rows) + "\n"
    return Outcome(doc, EXIT_OK, table=rows, pretty=pretty)


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _check(name, passed, **detail):
    return {"name": name, "passed": bool(passed), **detail}


def suite_oracle(max_N: int, max_m: int) -> list:
    from .radial_calculus import ell_oracle, lambda_oracle

    checks = []
    for N in range(2, max_N + 1):
        for m in range(1, min(N, max_m) + 1):
            a, b = ec.ell_value(N, m), ell_oracle(N, m)
            checks.append(_check(f"ell N={N} m={m}", a == b, formula=str(a), oracle=str(b)))
            for s in sorted({Fraction(m - N), Fraction(-2), Fraction(-1, 2), Fraction(1, 2), Fraction(3)}):
                a, b = ec.lambda_value(N, s, m), lambda_oracle(N, s, m)
                checks.append(_check(f"lambda N={N} s={s} m={m}", a == b, formula=str(a), oracle=str(b)))
    return checks


def suite_divk(N: int, k: int, alpha) -> list:
    from .radial_calculus import verify_divk_identity_log, verify_divk_identity_power

    if alpha is None:
        return [_check(f"log identity N={N} k={k}", verify_divk_identity_log(N, k))]
    a = Fraction(alpha)
    return [_check(f"power identity N={N} k={k} alpha={a}", verify_divk_identity_power(N, k, a))]


def suite_gamma(N: int) -> list:
    checks = []
    for a in range(1, N):
        checks.append(_check(f"gamma({a}) gamma({N - a}) = 2^N pi^N", ec.verify_gamma_reflection(N, a)))
    if N >= 3:
        lhs = ec.sphere_area(N) * ec.ExactReal(N - 2)
        checks.append(_check("omega (N-2) = gamma(2)", lhs == ec.riesz_gamma(N, 2), lhs=render(lhs)))
    if N >= 2:
        a, b = ec.beta_tilde(N, 1), ec.moser_alpha0(N)
        checks.append(_check("beta_tilde(1) = alpha_0", a == b, lhs=render(a), rhs=render(b)))
    if N % 2 == 0:
        a, b = ec.beta_tilde(N, N // 2), ec.adams_beta0(N, N // 2)
        checks.append(_check("beta_tilde(N/2) = beta_0(N/2)", a == b, lhs=render(a), rhs=render(b)))
    return checks


def suite_pointwise(N: int, m: int, k, count: int, seed: int, quad: QuadratureConfig) -> list:
    from .potentials import check_endpoint_pointwise, check_intermediate_pointwise, random_bumps

    checks = []
    for i, u in enumerate(random_bumps(count, seed, N + 2)):
        if k is None or k == m:
            rep = check_endpoint_pointwise(u, m, N, cfg=quad)
        else:
            rep = check_intermediate_pointwise(u, m, k, N, cfg=quad)
        checks.append(_check(f"bump {i}", rep.passed, min_margin=rep.min_margin, violations=rep.violations,
                             converged=rep.converged))
    return checks


def suite_fundamental(N: int, count: int, seed: int, quad: QuadratureConfig) -> list:
    from .potentials import log_fundamental_check, random_bumps

    checks = []
    for i, v in enumerate(random_bumps(count, seed, N + 2)):
        rep = log_fundamental_check(N, v, quad)
        checks.append(_check(f"bump {i}", rep.rel_error <= 1e-8 and rep.converged, value=rep.value,
                             target=rep.target, rel_error=rep.rel_error, converged=rep.converged))
    return checks


def cmd_verify(cfg: RunConfig) -> Outcome:
    scope = cfg.scope
    if scope == "oracle":
        checks = suite_oracle(cfg.max_N or 6, cfg.max_m or 4)
    elif scope == "divk":
        _need(cfg, "N", "k")
        checks = suite_divk(cfg.N, cfg.k, cfg.alpha)
    elif scope == "gamma-identities":
        _need(cfg, "N")
        checks = suite_gamma(cfg.N)
    elif scope == "pointwise":
        _need(cfg, "N", "m")
        checks = suite_pointwise(cfg.N, cfg.m, cfg.k, cfg.count or 5, cfg.seed, cfg.quad)
    elif scope == "fundamental":
        _need(cfg, "N")
        checks = suite_fundamental(cfg.N, cfg.count or 5, cfg.seed, cfg.quad)
    else:
        raise DomainError(f"unknown verify suite {scope!r}")
    passed = all(c["passed"] for c in checks)
    converged = all(c.get("converged", True) for c in checks)
    status = EXIT_OK if passed else (EXIT_NONCONVERGED if not converged else EXIT_FAIL)
    doc = {"schema": SCHEMA_VERSION, "command": "verify", "suite": scope, "config": _config_doc(cfg),
           "checks": checks, "passed": passed}
    pretty = "".join(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}\n" for c in checks)
    return Outcome(doc, status, table=checks, pretty=pretty)


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def cmd_experiment(cfg: RunConfig) -> Outcome:
    from . import extremizer_lab as lab

    scope = cfg.scope
    q = cfg.quad
    tol = cfg.assert_tol
    if scope == "ratio":
        _need(cfg, "N", "k")
        rep = lab.ratio_experiment(cfg.N, cfg.k, cfg.eps or lab.DEFAULT_EPS_GRID, q, tolerance=tol)
    elif scope == "seminorm":
        _need(cfg, "N", "m")
        p = Fraction(cfg.p) if cfg.p is not None else None
        rep = lab.seminorm_grad_experiment(cfg.N, cfg.m, p, cfg.eps or lab.DEFAULT_EPS_GRID, q, tolerance=tol)
    elif scope == "seminorm-dm":
        _need(cfg, "m")
        rep = lab.seminorm_Dm_experiment(cfg.m, cfg.eps or lab.DEFAULT_EPS_GRID, q, tolerance=tol)
    elif scope == "weak-delta":
        _need(cfg, "N", "k")
        rep = lab.weak_delta_coefficient(cfg.N, cfg.k, cfg.eps or lab.DEFAULT_EPS_GRID, q, tolerance=tol)
    elif scope == "moser":
        _need(cfg, "N", "m")
        scale = 1.1 if cfg.beta_scale is None else cfg.beta_scale
        rep = lab.moser_blowup(cfg.N, cfg.m, scale, cfg.eps or lab.MOSER_EPS_GRID, q)
    else:
        raise DomainError(f"unknown experiment {scope!r}")
    doc = rep.to_dict()
    doc["config"] = _config_doc(cfg)
    if not rep.converged:
        status = EXIT_NONCONVERGED
    elif rep.passed is False and (tol is not None or scope == "moser"):
        status = EXIT_FAIL
    else:
        status = EXIT_OK
    return Outcome(doc, status, pretty=rep.to_pretty(), csv_text=rep.to_csv())


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def _config_doc(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("format")
    return d


def _render(out: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out.doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if fmt == "pretty":
        return out.pretty or ""
    if out.csv_text is not None:
        return out.csv_text
    rows = out.table or []
    keys = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v, sort_keys=True) if isinstance(v, dict) else v) for k, v in r.items()})
    return buf.getvalue()


def _default_bits() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return 53
    try:
        bits = int(raw)
    except ValueError:
        raise SystemExit(f"{PRECISION_ENV} must be an integer, got {raw!r}")
    return bits


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--s", type=_frac_arg)
    common.add_argument("--alpha", type=_frac_arg)
    common.add_argument("--p", type=_frac_arg)
    common.add_argument("--eps", type=_eps_arg, default=[])
    common.add_argument("--beta-scale", type=float)
    common.add_argument("--max-N", type=int)
    common.add_argument("--max-m", type=int)
    common.add_argument("--count", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision-bits", type=int, default=None,
                        help=f"working precision (default from ${PRECISION_ENV} or 53)")
    common.add_argument("--rel-tol", type=float, default=1e-10)
    common.add_argument("--assert", dest="assert_tol", type=float, default=None,
                        help="fail (exit 1) unless the relative error is within this tolerance")
    common.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="sharpconst", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    scopes = {
        "constants": ("gamma", "ell", "lambda", "sharp", "adams", "moser", "bmo"),
        "verify": ("oracle", "divk", "gamma-identities", "pointwise", "fundamental"),
        "experiment": ("ratio", "seminorm", "seminorm-dm", "weak-delta", "moser"),
    }
    for name, choices in scopes.items():
        p = sub.add_parser(name, parents=[common])
        p.add_argument("scope", choices=choices)
    return parser


def make_config(args) -> RunConfig:
    bits = args.precision_bits if args.precision_bits is not None else _default_bits()
    return RunConfig(
        command=args.command, scope=args.scope, N=args.N, k=args.k, m=args.m,
        s=None if args.s is None else str(args.s),
        alpha=None if args.alpha is None else str(args.alpha),
        p=None if args.p is None else str(args.p),
        eps=list(args.eps), beta_scale=args.beta_scale, max_N=args.max_N, max_m=args.max_m,
        count=args.count, seed=args.seed, precision_bits=bits, rel_tol=args.rel_tol,
        assert_tol=args.assert_tol, format=args.format,
    )


def run(cfg: RunConfig) -> Outcome:
    handler = {"constants": cmd_constants, "verify": cmd_verify, "experiment": cmd_experiment}[cfg.command]
    return handler(cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        out = run(cfg)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    text = _render(out, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
