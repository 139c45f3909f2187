"""Command-line front end.

One binary with subcommands:

    plapeig ptrig-table  --p P --x-min A --x-max B --steps N
    plapeig classify     --potential SPEC [--grid-n N]
    plapeig eigs         --p P --potential SPEC [--ell L] --n-max N
    plapeig verify       --theorem t1|t2|t3|r1 --p P --potential SPEC ...
    plapeig sweep        --axis p|ell|depth --values V1,V2,... ...

Potentials are given inline as a JSON object or as a path to a JSON
file.  Option precedence is CLI flags over config file (--config) over
built-in defaults, and every report echoes the effective configuration
so it can be reproduced from its own header.  Data goes to stdout or
--out; diagnostics go to stderr.  Numbers are emitted with 17
significant digits (round-trip safe) and CSV output is locale
independent.

Exit codes: 0 success/verified, 2 usage or solver failure, 3 statement
violated, 4 inconclusive (hypothesis mismatch or solver could not
decide).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

from .eigensolver import SolverConfig, compute_spectrum
from .errors import PLapError, PotentialParseError
from .potentials import Potential, classify, parse_potential_spec, restrict, scaled_tent
from .prufer import ToleranceConfig
from .ptrig import make_context, sp_pair
from .theorems import (CSV_HEADER, HarnessConfig, verify_remark1,
                       verify_theorem1, verify_theorem2, verify_theorem3)

EXIT_OK = 0
EXIT_ERROR = 2       # usage problems and solver failures
EXIT_VIOLATED = 3
EXIT_INCONCLUSIVE = 4

DEFAULTS = {
    "p": 2.0,
    "ell": 1.0,
    "n_max": 4,
    "rel_tol": 1e-10,
    "abs_tol": 1e-12,
    "phase_tol": 1e-9,
    "max_steps": 200_000,
    "grid_n": 1024,
    "rho_points": 32,
    "rho_span": 4.0,
    "ell_points": 24,
    "slack_rel": 1e-8,
    "slack_abs": 1e-10,
    "format": "csv",
    "seed": 0,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Effective run configuration (defaults, config file, CLI merged)."""

    p: float = 2.0
    potential: dict | None = None
    ell: float = 1.0
    n_max: int = 4
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    phase_tol: float = 1e-9
    max_steps: int = 200_000
    grid_n: int = 1024
    rho_points: int = 32
    rho_span: float = 4.0
    ell_points: int = 24
    slack_rel: float = 1e-8
    slack_abs: float = 1e-10
    format: str = "csv"
    out: str | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.ell > 0.0 or self.ell > 1.0:
            raise UsageError(f"--ell must lie in (0, 1], got {self.ell}")
        if self.n_max < 1:
            raise UsageError(f"--n-max must be >= 1, got {self.n_max}")
        for name in ("rel_tol", "abs_tol", "phase_tol", "slack_rel", "slack_abs"):
            if getattr(self, name) <= 0.0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.format not in ("csv", "report"):
            raise UsageError(f"--format must be csv or report, got {self.format}")

    def tolerance(self) -> ToleranceConfig:
        return ToleranceConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                               max_steps=self.max_steps)

    def solver(self) -> SolverConfig:
        return SolverConfig(phase_tol=self.phase_tol,
                            tolerance=self.tolerance())

    def harness(self) -> HarnessConfig:
        return HarnessConfig(solver=self.solver(),
                             slack_rel=self.slack_rel,
                             slack_abs=self.slack_abs,
                             rho_points=self.rho_points,
                             rho_span=self.rho_span,
                             ell_points=self.ell_points,
                             classify_grid=self.grid_n)

    def echo_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "p", "ell", "n_max", "rel_tol", "abs_tol", "phase_tol",
            "max_steps", "grid_n", "rho_points", "rho_span", "ell_points",
            "slack_rel", "slack_abs", "format", "seed")}
        if self.potential is not None:
            d["potential"] = self.potential
        d.update(self.extra)
        return d


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _load_potential(arg: str) -> Potential:
    text = arg.strip()
    if not text.startswith("{"):
        try:
            with open(arg, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read potential file {arg!r}: {exc}") from exc
    try:
        return parse_potential_spec(text)
    except PotentialParseError as exc:
        raise UsageError(f"invalid potential spec: {exc}") from exc


_COMMON_KEYS = ["format", "seed"]


def _merge_config(args: argparse.Namespace, keys: list[str]) -> RunConfig:
    keys = list(keys) + [k for k in _COMMON_KEYS if k not in keys]
    merged = dict(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {config_path!r}: {exc}")
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(DEFAULTS) - {"potential", "out"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val

    cfg = RunConfig(
        p=float(merged["p"]), ell=float(merged["ell"]),
        n_max=int(merged["n_max"]), rel_tol=float(merged["rel_tol"]),
        abs_tol=float(merged["abs_tol"]), phase_tol=float(merged["phase_tol"]),
        max_steps=int(merged["max_steps"]), grid_n=int(merged["grid_n"]),
        rho_points=int(merged["rho_points"]), rho_span=float(merged["rho_span"]),
        ell_points=int(merged["ell_points"]),
        slack_rel=float(merged["slack_rel"]),
        slack_abs=float(merged["slack_abs"]),
        format=str(merged["format"]), out=getattr(args, "out", None),
        seed=int(merged["seed"]))
    pot = getattr(args, "potential", None) or merged.get("potential")
    if pot is not None:
        if isinstance(pot, dict):
            cfg.potential = pot
        else:
            cfg.potential = _load_potential(pot).to_spec()
    cfg.validate()
    return cfg


def _emit(cfg: RunConfig, header: tuple[str, ...], rows: list[tuple],
          payload_kind: str) -> None:
    """Write CSV (with '#' config comments) or a JSON report."""
    if cfg.format == "csv":
        buf = io.StringIO()
        for key, val in sorted(cfg.echo_dict().items()):
            buf.write(f"# {key}={json.dumps(val, sort_keys=True) if isinstance(val, dict) else _fmt(val)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    else:
        doc = {"config": cfg.echo_dict(), "kind": payload_kind,
               "columns": list(header),
               "rows": [[v for v in row] for row in rows]}
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    _write_out(cfg, text)


def _write_out(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_ptrig_table(args) -> int:
    cfg = _merge_config(args, ["p", "format"])
    if args.steps is None or args.steps < 2:
        raise UsageError("--steps must be >= 2")
    if args.x_max is None or args.x_min is None or not (args.x_max > args.x_min):
        raise UsageError("--x-max must exceed --x-min")
    ctx = make_context(cfg.p)  # rejects p <= 1
    cfg.extra = {"x_min": args.x_min, "x_max": args.x_max, "steps": args.steps}
    rows = []
    for i in range(args.steps + 1):
        x = args.x_min + (args.x_max - args.x_min) * i / args.steps
        s, c = sp_pair(ctx, x)
        rows.append((x, s, c, abs(s) ** ctx.p + abs(c) ** ctx.p))
    _emit(cfg, ("x", "sp", "sp_prime", "identity"), rows, "ptrig_table")
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _merge_config(args, ["potential", "grid_n", "format"])
    if cfg.potential is None:
        raise UsageError("--potential is required")
    q = parse_potential_spec(cfg.potential)
    cert = classify(q, cfg.grid_n)
    d = cert.as_dict()
    header = tuple(d.keys())
    _emit(cfg, header, [tuple(d.values())], "shape_certificate")
    return EXIT_OK


def cmd_eigs(args) -> int:
    cfg = _merge_config(args, ["p", "potential", "ell", "n_max", "rel_tol",
                               "abs_tol", "phase_tol", "max_steps", "format"])
    if cfg.potential is None:
        raise UsageError("--potential is required")
    ctx = make_context(cfg.p)
    q = parse_potential_spec(cfg.potential)
    if cfg.ell < q.domain_end:
        q = restrict(q, cfg.ell)
    try:
        spectrum = compute_spectrum(ctx, q, cfg.n_max, cfg.ell, cfg.solver())
    except PLapError as exc:
        index = getattr(exc, "details", {}).get("n", "?")
        print(f"eigenvalue search failed at index {index}: {exc}",
              file=sys.stderr)
        return EXIT_ERROR
    rows = [(pr.n, pr.lam, pr.rho, pr.phi_end, pr.residual, pr.zero_count,
             pr.bracket_width) for pr in spectrum.pairs]
    _emit(cfg, ("n", "lambda", "rho", "phi_end", "residual", "zero_count",
                "bracket_width"), rows, "spectrum")
    return EXIT_OK


_THEOREMS = {"t1": verify_theorem1, "t2": verify_theorem2,
             "t3": verify_theorem3, "r1": verify_remark1}


def cmd_verify(args) -> int:
    cfg = _merge_config(args, ["p", "potential", "ell", "n_max", "rel_tol",
                               "abs_tol", "phase_tol", "max_steps", "grid_n",
                               "rho_points", "rho_span", "ell_points",
                               "slack_rel", "slack_abs", "format"])
    if cfg.potential is None:
        raise UsageError("--potential is required")
    theorem = (args.theorem or "").lower()
    if theorem not in _THEOREMS:
        raise UsageError("--theorem must be one of t1, t2, t3, r1")
    ctx = make_context(cfg.p)
    q = parse_potential_spec(cfg.potential)
    harness = cfg.harness()
    try:
        if theorem == "t1":
            cert = verify_theorem1(ctx, q, cfg=harness)
        elif theorem == "t2":
            cert = verify_theorem2(ctx, q, n_max=cfg.n_max, cfg=harness)
        elif theorem == "t3":
            cert = verify_theorem3(ctx, q, n_max=cfg.n_max, cfg=harness)
        else:
            cert = verify_remark1(ctx, q, n_max=cfg.n_max, cfg=harness)
    except PLapError as exc:
        print(f"verification harness failed: {exc}", file=sys.stderr)
        return EXIT_ERROR

    cfg.extra = {"theorem": theorem}
    if cfg.format == "csv":
        _emit(cfg, CSV_HEADER, cert.csv_rows(), "theorem_certificate")
    else:
        doc = {"config": cfg.echo_dict(), "kind": "theorem_certificate",
               "certificate": cert.to_report_dict()}
        _write_out(cfg, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    print(f"{cert.theorem_id}: {cert.verdict} "
          f"(worst margin {_fmt(cert.worst_margin)})", file=sys.stderr)
    if cert.verdict == "verified":
        return EXIT_OK
    if cert.verdict == "violated":
        return EXIT_VIOLATED
    return EXIT_INCONCLUSIVE


def cmd_sweep(args) -> int:
    cfg = _merge_config(args, ["p", "potential", "ell", "n_max", "rel_tol",
                               "abs_tol", "phase_tol", "max_steps", "format"])
    if cfg.potential is None:
        raise UsageError("--potential is required")
    axis = (args.axis or "").lower()
    if axis not in ("p", "ell", "depth"):
        raise UsageError("--axis must be one of p, ell, depth")
    try:
        values = [float(v) for v in (args.values or "").split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--values must be a comma list of numbers: {exc}")
    if len(values) < 2:
        raise UsageError("--values needs at least 2 points")
    cfg.extra = {"axis": axis, "values": ",".join(_fmt(v) for v in values)}

    base = parse_potential_spec(cfg.potential)
    rows = []
    try:
        for v in values:
            p = cfg.p
            ell = cfg.ell
            q = base
            if axis == "p":
                p = v
            elif axis == "ell":
                ell = v
                if not 0.0 < ell <= 1.0:
                    raise UsageError(f"ell value {ell} outside (0, 1]")
            else:
                if base.kind != "builtin_family":
                    raise UsageError("--axis depth requires a scaled_tent potential")
                q = scaled_tent(v, dict(base.params)["rise"])
            if ell < q.domain_end:
                q = restrict(q, ell)
            ctx = make_context(p)
            spectrum = compute_spectrum(ctx, q, cfg.n_max, ell, cfg.solver())
            lam1 = spectrum.pairs[0].lam
            for pr in spectrum.pairs:
                rows.append((v, pr.n, pr.lam, pr.lam / lam1,
                             float(pr.n) ** p))
    except PLapError as exc:
        index = getattr(exc, "details", {}).get("n", "?")
        print(f"sweep failed at axis value (index {index}): {exc}",
              file=sys.stderr)
        return EXIT_ERROR
    _emit(cfg, ("axis", "n", "lambda", "ratio_to_lambda1", "bound"), rows,
          "sweep")
    return EXIT_OK


def _add_common(sub: argparse.ArgumentParser, potential: bool = True) -> None:
    sub.add_argument("--p", type=float, default=None,
                     help="exponent p > 1 of the p-Laplacian")
    sub.add_argument("--config", default=None,
                     help="JSON config file; CLI flags override it")
    sub.add_argument("--format", choices=("csv", "report"), default=None,
                     help="output format (csv or JSON report)")
    sub.add_argument("--out", default=None, help="write output to this path")
    sub.add_argument("--seed", type=int, default=None,
                     help="seed echoed into reports (randomized potential "
                          "utilities)")
    if potential:
        sub.add_argument("--potential", default=None,
                         help="potential spec: inline JSON object or file path")
        sub.add_argument("--ell", type=float, default=None,
                         help="right endpoint of the interval, in (0, 1]")
        sub.add_argument("--n-max", dest="n_max", type=int, default=None,
                         help="number of eigenvalues")
        sub.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
        sub.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
        sub.add_argument("--phase-tol", dest="phase_tol", type=float,
                         default=None)
        sub.add_argument("--max-steps", dest="max_steps", type=int,
                         default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plapeig",
        description="Dirichlet spectra of the one-dimensional p-Laplacian "
                    "and eigenvalue-ratio verification")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("ptrig-table",
                        help="tabulate S_p, S_p' and the power identity")
    _add_common(s, potential=False)
    s.add_argument("--x-min", dest="x_min", type=float, default=None)
    s.add_argument("--x-max", dest="x_max", type=float, default=None)
    s.add_argument("--steps", type=int, default=None,
                   help="number of grid intervals (emits steps+1 rows)")
    s.set_defaults(func=cmd_ptrig_table)

    s = subs.add_parser("classify", help="shape-certify a potential")
    _add_common(s)
    s.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    s.set_defaults(func=cmd_classify)

    s = subs.add_parser("eigs", help="compute the Dirichlet spectrum")
    _add_common(s)
    s.set_defaults(func=cmd_eigs)

    s = subs.add_parser("verify", help="run a verification harness")
    _add_common(s)
    s.add_argument("--theorem", choices=("t1", "t2", "t3", "r1"),
                   default=None)
    s.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    s.add_argument("--rho-points", dest="rho_points", type=int, default=None)
    s.add_argument("--rho-span", dest="rho_span", type=float, default=None)
    s.add_argument("--ell-points", dest="ell_points", type=int, default=None)
    s.add_argument("--slack-rel", dest="slack_rel", type=float, default=None)
    s.add_argument("--slack-abs", dest="slack_abs", type=float, default=None)
    s.set_defaults(func=cmd_verify)

    s = subs.add_parser("sweep", help="parameter sweep, long-form CSV")
    _add_common(s)
    s.add_argument("--axis", choices=("p", "ell", "depth"), default=None)
    s.add_argument("--values", default=None,
                   help="comma-separated axis values (at least 2)")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except PLapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
