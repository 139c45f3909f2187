"""Verification harnesses for the eigenvalue-ratio statements.

Each harness checks the hypotheses of one statement on a concrete
potential, scans the quantified variable (spectral parameter, index
pair, or interval length), and emits a machine-readable certificate
with one margin per scan point:

  T1  scaled-phase sensitivity: theta's rho-derivative at the turning
      point x0 is nonpositive once rho^p >= -2 q(0), for nonpositive q
      nondecreasing on [0, x0].
  T2  ratio lower bound: lambda_n / lambda_m >= n^p / m^p for
      nonpositive single-barrier q, restricted to pairs with
      lambda_m >= -2 q*, q* = min(q(0), q(1)).
  T3  truncated intervals: there is an ell_0 in (0, 1], bounded by
      (-p / (3 q*))^(1/p), such that on [0, ell] with ell <= ell_0 the
      first eigenvalue is positive and the ratio lower bound holds for
      every pair.
  R1  mirrored regime: nonnegative single-well q gives the upper bound
      lambda_n / lambda_m <= n^p / m^p.

Inequalities are asserted with explicit slack (relative for ratios,
absolute for the sensitivity sign) so that "violated" is distinguished
from solver noise; the slack used is printed in every certificate.
Certificates are deterministic: identical inputs and configuration
produce identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import SolverConfig, find_eigenvalue, sign_of_lambda1
from .errors import PLapError, SearchError, UnsupportedRegimeError
from .potentials import (BARRIER_LIKE, WELL_LIKE, Potential, Shape,
                         classify, restrict)
from .prufer import integrate_sensitivity
from .ptrig import PContext

VERIFIED = "verified"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

CSV_HEADER = ("theorem_id", "quantity", "rho", "ell", "m", "n",
              "value", "bound", "margin", "in_hypothesis", "satisfied", "note")


@dataclass(frozen=True)
class HarnessConfig:
    """Scan resolution and slack for the verification harnesses."""

    solver: SolverConfig = field(default_factory=SolverConfig)
    slack_rel: float = 1e-8   # ratio inequalities
    slack_abs: float = 1e-10  # sensitivity sign
    rho_points: int = 32
    rho_span: float = 4.0     # grid reaches rho_span * threshold
    ell_points: int = 24
    classify_grid: int = 1024


@dataclass(frozen=True)
class ScanPoint:
    """One scanned inequality instance.

    ``margin`` is signed so that nonnegative means satisfied with room;
    points outside the statement's hypothesis are recorded but never
    count toward the verdict.
    """

    quantity: str
    inputs: tuple[tuple[str, float], ...]
    value: float
    bound: float
    margin: float
    in_hypothesis: bool
    satisfied: bool
    note: str = ""

    def csv_row(self, theorem_id: str) -> tuple:
        cols = dict(self.inputs)
        return (theorem_id, self.quantity,
                _fmt(cols.get("rho")), _fmt(cols.get("ell")),
                _fmt(cols.get("m"), integer=True), _fmt(cols.get("n"), integer=True),
                _fmt(self.value), _fmt(self.bound), _fmt(self.margin),
                str(self.in_hypothesis).lower(), str(self.satisfied).lower(),
                self.note)


def _fmt(v, integer: bool = False) -> str:
    if v is None:
        return ""
    if integer:
        return str(int(v))
    return format(float(v), ".17g")


@dataclass(frozen=True)
class TheoremCertificate:
    """Hypotheses, scan table, verdict and margins for one statement."""

    theorem_id: str  # "T1" | "T2" | "T3" | "R1"
    verdict: str
    worst_margin: float
    hypotheses: dict
    scan: tuple[ScanPoint, ...]
    config: dict
    notes: tuple[str, ...] = ()

    def to_report_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "verdict": self.verdict,
            "worst_margin": self.worst_margin,
            "hypotheses": self.hypotheses,
            "scan": [
                {"quantity": s.quantity, "inputs": dict(s.inputs),
                 "value": s.value, "bound": s.bound, "margin": s.margin,
                 "in_hypothesis": s.in_hypothesis, "satisfied": s.satisfied,
                 "note": s.note}
                for s in self.scan],
            "notes": list(self.notes),
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_report_dict(), sort_keys=True, indent=2)

    def csv_rows(self) -> list[tuple]:
        return [s.csv_row(self.theorem_id) for s in self.scan]


def _config_dict(ctx: PContext, q: Potential, cfg: HarnessConfig,
                 **extra) -> dict:
    d = {"p": ctx.p, "potential": q.to_spec(),
         "slack_rel": cfg.slack_rel, "slack_abs": cfg.slack_abs,
         "phase_tol": cfg.solver.phase_tol,
         "rel_tol": cfg.solver.tolerance.rel_tol,
         "abs_tol": cfg.solver.tolerance.abs_tol,
         "classify_grid": cfg.classify_grid}
    d.update(extra)
    return d


def _finalize(theorem_id: str, hypotheses: dict, scan: list[ScanPoint],
              config: dict, notes: list[str], had_errors: bool,
              force_inconclusive: bool = False) -> TheoremCertificate:
    in_points = [s for s in scan if s.in_hypothesis]
    worst = min((s.margin for s in in_points), default=math.nan)
    if any(not s.satisfied for s in in_points):
        verdict = VIOLATED
    elif had_errors or force_inconclusive or not in_points:
        verdict = INCONCLUSIVE
    else:
        verdict = VERIFIED
    return TheoremCertificate(theorem_id=theorem_id, verdict=verdict,
                              worst_margin=worst, hypotheses=hypotheses,
                              scan=tuple(scan), config=config,
                              notes=tuple(notes))


def _hypothesis_failure(theorem_id: str, hypotheses: dict, config: dict,
                        reason: str) -> TheoremCertificate:
    return TheoremCertificate(theorem_id=theorem_id, verdict=INCONCLUSIVE,
                              worst_margin=math.nan, hypotheses=hypotheses,
                              scan=(), config=config,
                              notes=(f"hypothesis failure: {reason}",))


def verify_theorem1(ctx: PContext, q: Potential,
                    rho_grid=None,
                    cfg: HarnessConfig = HarnessConfig()) -> TheoremCertificate:
    """Sign of theta's rho-derivative at the turning point.

    Integrates the variational sensitivity over [0, x0] for each grid
    rho and checks theta_dot(x0, rho) <= slack_abs wherever
    rho >= (-2 q(0))^(1/p); grid points below the threshold are
    recorded out of hypothesis.
    """
    full = classify(q, cfg.classify_grid)
    x0 = full.x0
    notes: list[str] = []
    hypotheses: dict = {"shape_certificate": full.as_dict(), "x0": x0}

    trivial_interval = x0 < 1e-9
    if trivial_interval:
        sub = full
        q0 = q.value(0.0)
    else:
        qr = restrict(q, x0)
        sub = classify(qr, cfg.classify_grid)
        q0 = qr.value(0.0)
    hypotheses["restricted_shape"] = sub.shape.value
    hypotheses["q0"] = q0

    threshold = 0.0 if q0 >= 0.0 else (-2.0 * q0) ** (1.0 / ctx.p)
    hypotheses["rho_threshold"] = threshold
    config = _config_dict(ctx, q, cfg, rho_points=cfg.rho_points,
                          rho_span=cfg.rho_span)

    if not sub.nonpositive:
        return _hypothesis_failure("T1", hypotheses, config,
                                   "q must be nonpositive on [0, x0]")
    if not trivial_interval and sub.shape not in (Shape.MONOTONE_INCREASING,
                                                  Shape.CONSTANT):
        return _hypothesis_failure(
            "T1", hypotheses, config,
            f"q must be nondecreasing on [0, x0]; certified {sub.shape.value}")

    if rho_grid is None:
        if threshold > 0.0:
            rho_grid = np.geomspace(threshold, cfg.rho_span * threshold,
                                    cfg.rho_points)
        else:
            ref = max(1.0, ctx.pi_p)
            rho_grid = np.geomspace(0.5 * ref, cfg.rho_span * ref,
                                    cfg.rho_points)
            notes.append("degenerate threshold q(0) = 0: any rho > 0 "
                         "is in hypothesis; default grid uses pi_p scale")
    rho_grid = sorted(float(r) for r in np.asarray(rho_grid, dtype=float))

    scan: list[ScanPoint] = []
    had_errors = False
    for rho in rho_grid:
        in_hyp = rho >= threshold * (1.0 - 1e-13)
        note = "" if in_hyp else "below rho threshold"
        if trivial_interval:
            td = 0.0
            note = (note + "; " if note else "") + "empty turning interval"
        else:
            try:
                td = integrate_sensitivity(ctx, q, rho, x0,
                                           cfg.solver.tolerance).theta_dot_end
            except PLapError as exc:
                had_errors = True
                scan.append(ScanPoint("theta_dot", (("rho", rho),),
                                      math.nan, 0.0, math.nan, in_hyp, False,
                                      f"integration failed: {exc}"))
                continue
        scan.append(ScanPoint("theta_dot", (("rho", rho),),
                              td, 0.0, -td, in_hyp,
                              td <= cfg.slack_abs, note))

    if sub.nonnegative and sub.nonpositive:
        notes.append("q vanishes on [0, x0]: rigidity direction, "
                     "theta_dot should be identically zero")
    return _finalize("T1", hypotheses, scan, config, notes, had_errors)


def _collect_lambdas(ctx: PContext, q: Potential, n_max: int, ell: float,
                     cfg: HarnessConfig, notes: list[str]
                     ) -> tuple[dict[int, float], bool]:
    """Eigenvalues 1..n_max; indices with lambda <= 0 are skipped with a
    note (out of every threshold hypothesis), other failures flag errors."""
    lambdas: dict[int, float] = {}
    had_errors = False
    for n in range(1, n_max + 1):
        try:
            lambdas[n] = find_eigenvalue(ctx, q, n, ell, cfg.solver).lam
        except UnsupportedRegimeError:
            notes.append(f"lambda_{n} <= 0: index skipped, out of hypothesis")
        except SearchError as exc:
            had_errors = True
            notes.append(f"eigenvalue search failed at n={n}: {exc}")
    return lambdas, had_errors


def _ratio_points(ctx: PContext, lambdas: dict[int, float], n_max: int,
                  threshold: float | None, lower: bool, cfg: HarnessConfig,
                  ell: float | None = None) -> list[ScanPoint]:
    """Pairwise ratio checks; ``lower`` picks the bound direction.

    With a ``threshold``, pairs need lambda_m >= threshold to be in
    hypothesis (strictness lambda_n > lambda_m is enforced with slack).
    """
    p = ctx.p
    points = []
    base_inputs = (("ell", ell),) if ell is not None else ()
    for m in range(1, n_max + 1):
        if m not in lambdas:
            continue
        for n in range(m + 1, n_max + 1):
            if n not in lambdas:
                continue
            lam_m, lam_n = lambdas[m], lambdas[n]
            bound = (n / m) ** p
            ratio = lam_n / lam_m
            lhs = lam_n * m ** p
            rhs = lam_m * n ** p
            slack = cfg.slack_rel * abs(rhs)
            if lower:
                satisfied = lhs >= rhs - slack
                margin = (lhs - rhs) / abs(rhs)
            else:
                satisfied = lhs <= rhs + slack
                margin = (rhs - lhs) / abs(rhs)
            in_hyp = True
            note = ""
            if threshold is not None:
                strict = lam_n - lam_m > cfg.slack_rel * max(1.0, abs(lam_m))
                if lam_m < threshold:
                    in_hyp = False
                    note = "lambda_m below threshold"
                elif not strict:
                    in_hyp = False
                    note = "lambda_n > lambda_m not strict within slack"
            points.append(ScanPoint(
                "ratio", base_inputs + (("m", float(m)), ("n", float(n))),
                ratio, bound, margin, in_hyp, satisfied, note))
    return points


def verify_theorem2(ctx: PContext, q: Potential, n_max: int = 6,
                    cfg: HarnessConfig = HarnessConfig()) -> TheoremCertificate:
    """Ratio lower bound for nonpositive single-barrier potentials.

    Pairs with lambda_m below the threshold -2 q* are recorded
    separately and never count against the statement (threshold
    sharpness probe).
    """
    cert = classify(q, cfg.classify_grid)
    threshold = -2.0 * cert.q_star
    hypotheses = {"shape_certificate": cert.as_dict(),
                  "lambda_threshold": threshold}
    config = _config_dict(ctx, q, cfg, n_max=n_max)

    if not cert.nonpositive:
        return _hypothesis_failure("T2", hypotheses, config,
                                   "q must be nonpositive")
    if cert.shape not in BARRIER_LIKE:
        return _hypothesis_failure(
            "T2", hypotheses, config,
            f"q must be single-barrier; certified {cert.shape.value}")

    notes: list[str] = []
    lambdas, had_errors = _collect_lambdas(ctx, q, n_max, q.domain_end, cfg,
                                           notes)
    hypotheses["lambdas"] = [lambdas.get(n) for n in range(1, n_max + 1)]
    scan = _ratio_points(ctx, lambdas, n_max, threshold, lower=True, cfg=cfg)
    if cert.nonnegative and cert.nonpositive:
        notes.append("q vanishes: rigidity direction, ratios should be exact")
    return _finalize("T2", hypotheses, scan, config, notes, had_errors)


def verify_theorem3(ctx: PContext, q: Potential, ell_grid=None,
                    n_max: int = 4,
                    cfg: HarnessConfig = HarnessConfig()) -> TheoremCertificate:
    """Truncated-interval positivity and ratio bound.

    Scans ell through (0, ell_bound] with
    ell_bound = min(1, (-p/(3 q*))^(1/p)); at each ell requires
    lambda_1(ell) > 0 (by the lambda = 0 shot) and the ratio lower bound
    for every pair.  The statement only asserts that some ell_0 > 0
    works, so once a grid point fails, it and every larger grid point
    are recorded out of hypothesis and the certificate reports the
    empirical ell_hat; if the smallest grid point already fails the
    verdict is inconclusive.
    """
    cert = classify(q, cfg.classify_grid)
    hypotheses = {"shape_certificate": cert.as_dict()}
    config = _config_dict(ctx, q, cfg, n_max=n_max, ell_points=cfg.ell_points)

    if not cert.nonpositive:
        return _hypothesis_failure("T3", hypotheses, config,
                                   "q must be nonpositive")
    if cert.shape not in BARRIER_LIKE:
        return _hypothesis_failure(
            "T3", hypotheses, config,
            f"q must be single-barrier; certified {cert.shape.value}")

    notes: list[str] = []
    q_star = cert.q_star
    if q_star >= 0.0:
        ell_bound = 1.0
        notes.append("degenerate threshold q* = 0: length bound formula "
                     "does not apply, using ell_bound = 1")
    else:
        ell_bound = min(1.0, (-ctx.p / (3.0 * q_star)) ** (1.0 / ctx.p))
    hypotheses["ell_bound"] = ell_bound

    if ell_grid is None:
        ell_grid = [ell_bound * i / cfg.ell_points
                    for i in range(1, cfg.ell_points + 1)]
    ell_grid = sorted(float(e) for e in ell_grid)

    scan: list[ScanPoint] = []
    had_errors = False
    broke_at: float | None = None
    ell_hat = 0.0
    for ell in ell_grid:
        beyond_bound = ell > ell_bound * (1.0 + 1e-13)
        beyond_break = broke_at is not None
        in_hyp = not (beyond_bound or beyond_break)
        base_note = ("beyond ell_bound" if beyond_bound
                     else "beyond empirical ell_hat" if beyond_break else "")

        qr = restrict(q, ell)
        sign = sign_of_lambda1(ctx, qr, ell, cfg.solver)
        positive = sign.classification == "positive"
        ell_points_here: list[ScanPoint] = []

        lam1 = math.nan
        if positive:
            lambdas, errs = _collect_lambdas(ctx, qr, n_max, ell, cfg, notes)
            had_errors |= errs
            lam1 = lambdas.get(1, math.nan)
            pair_pts = _ratio_points(ctx, lambdas, n_max, threshold=None,
                                     lower=True, cfg=cfg, ell=ell)
        else:
            pair_pts = []

        ell_points_here.append(ScanPoint(
            "lambda1", (("ell", ell),), lam1, 0.0,
            lam1 if positive else -1.0, in_hyp, positive,
            base_note if positive else
            (base_note + "; " if base_note else "")
            + f"sign_of_lambda1: {sign.classification}"))
        ell_points_here.extend(pair_pts)

        ok_here = positive and all(s.satisfied for s in pair_pts)
        if in_hyp and not ok_here:
            # existence statement: this and larger lengths leave the
            # empirically certified range instead of refuting the claim
            broke_at = ell
            ell_points_here = [
                ScanPoint(s.quantity, s.inputs, s.value, s.bound, s.margin,
                          False, s.satisfied,
                          (s.note + "; " if s.note else "")
                          + "property breaks at this ell")
                for s in ell_points_here]
            notes.append(f"property breaks at ell={ell!r} <= ell_bound; "
                         "flagged, existence claim judged by smaller ell")
        elif in_hyp and ok_here:
            ell_hat = ell
        if not in_hyp:
            ell_points_here = [
                ScanPoint(s.quantity, s.inputs, s.value, s.bound, s.margin,
                          False, s.satisfied,
                          s.note if s.note else base_note)
                for s in ell_points_here]
        scan.extend(ell_points_here)

    hypotheses["ell_hat"] = ell_hat
    force_inconclusive = ell_hat == 0.0
    if force_inconclusive:
        notes.append("no positive ell certified at this grid resolution")
    return _finalize("T3", hypotheses, scan, config, notes, had_errors,
                     force_inconclusive=force_inconclusive)


def verify_remark1(ctx: PContext, q: Potential, n_max: int = 6,
                   cfg: HarnessConfig = HarnessConfig()) -> TheoremCertificate:
    """Ratio upper bound for nonnegative single-well potentials."""
    cert = classify(q, cfg.classify_grid)
    hypotheses = {"shape_certificate": cert.as_dict()}
    config = _config_dict(ctx, q, cfg, n_max=n_max)

    if not cert.nonnegative:
        return _hypothesis_failure("R1", hypotheses, config,
                                   "q must be nonnegative")
    if cert.shape not in WELL_LIKE:
        return _hypothesis_failure(
            "R1", hypotheses, config,
            f"q must be single-well; certified {cert.shape.value}")

    notes: list[str] = []
    lambdas, had_errors = _collect_lambdas(ctx, q, n_max, q.domain_end, cfg,
                                           notes)
    hypotheses["lambdas"] = [lambdas.get(n) for n in range(1, n_max + 1)]
    scan = _ratio_points(ctx, lambdas, n_max, threshold=None, lower=False,
                         cfg=cfg)
    return _finalize("R1", hypotheses, scan, config, notes, had_errors)
