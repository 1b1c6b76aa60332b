"""Batch verification entry point.

Subcommands:

* ``verify {cocycle|lemma|algebra|whitney|all}`` runs a named check suite,
* ``central-charge {SCALE|p1hat}`` transgresses at a scale and measures the
  central charge of the resulting extension,
* ``sweep {lambda|resolution} --values ...`` tabulates the pipeline across a
  parameter range, emitting CSV alongside the JSON report.

Reports are JSON with a stable schema {config, checks, summary}; checks are
ordered by name and always carry the measured value, never a bare verdict.
Identical config and seed produce byte-identical reports when wall-clock
data is suppressed with ``--no-timestamp``.  Exit status: 0 if every check
passed, 1 if any failed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import chernweil, cocycle, simplicial, witt
from . import diffeo as diff

USAGE_ERROR = 2

DEFAULT_TOLERANCES = {
    "central_charge_rel": 1e-2,
    "central_charge_abs": 1e-9,
    "cocycle_zero": 1e-12,
    "cocycle_defect": 1e-8,
    "defect_shrink_factor": 10.0,
    "variant_agreement": 1e-10,
    "self_pairing": 1e-10,
    "unit_modulus": 1e-12,
    "pushout_consistency": 1e-12,
    "group_law": 1e-8,
    "lemma_residual": 1e-9,
    "lemma_mutation_min": 1e-1,
    "fiber_vs_direct_rel": 1e-10,
    "double_coboundary": 1e-9,
    "jacobi": 0.0,
    "sl2_residual_rel": 1e-3,
    "cubic_window_rel": 1e-2,
    "whitney_lambda": 1e-12,
    "whitney_formula": 1e-12,
    "sweep_linearity_rel": 1e-2,
}


@dataclass
class RunConfig:
    """Numerical parameters shared by every suite."""

    fourier_order: int = diff.DEFAULT_ORDER
    quadrature_points: int = cocycle.DEFAULT_RESOLUTION
    fd_step: float = 1e-3
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    report_path: str | None = None
    no_timestamp: bool = False

    def __post_init__(self):
        if self.fourier_order <= 0 or self.quadrature_points <= 0 or self.fd_step <= 0:
            raise ValueError("fourier_order, quadrature_points and fd_step must be positive")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance name(s): {sorted(unknown)}")

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def as_dict(self) -> dict:
        return {
            "fourier_order": self.fourier_order,
            "quadrature_points": self.quadrature_points,
            "fd_step": self.fd_step,
            "seed": self.seed,
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
        }


@dataclass
class CheckResult:
    name: str
    description: str
    computed: float
    expected: float
    tolerance: float
    passed: bool
    runtime_s: float = 0.0

    def as_dict(self, with_runtime: bool) -> dict:
        out = {
            "name": self.name,
            "description": self.description,
            "computed": self.computed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }
        out["runtime_s"] = round(self.runtime_s, 4) if with_runtime else 0.0
        return out


class _Suite:
    """Collects checks; timing is recorded per check."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.checks: list[CheckResult] = []
        self._t0 = time.perf_counter()

    def add(self, name, description, computed, expected, tolerance, passed=None):
        elapsed = time.perf_counter() - self._t0
        if passed is None:
            passed = abs(computed - expected) <= tolerance
        self.checks.append(
            CheckResult(name, description, float(computed), float(expected),
                        float(tolerance), bool(passed), elapsed)
        )
        self._t0 = time.perf_counter()


def build_report(config: RunConfig, checks: list[CheckResult]) -> dict:
    checks = sorted(checks, key=lambda c: c.name)
    summary = {
        "n_checks": len(checks),
        "n_failed": sum(not c.passed for c in checks),
        "passed": all(c.passed for c in checks),
    }
    if not config.no_timestamp:
        summary["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return {
        "config": config.as_dict(),
        "checks": [c.as_dict(with_runtime=not config.no_timestamp) for c in checks],
        "summary": summary,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def emit_report(report: dict, config: RunConfig):
    text = report_json(report)
    if config.report_path:
        Path(config.report_path).write_text(text)
    else:
        sys.stdout.write(text)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(
            f"[{status}] {check['name']}: computed={check['computed']:.6g} "
            f"expected={check['expected']:.6g} tol={check['tolerance']:.2g}",
            file=sys.stderr,
        )


# ---------------------------------------------------------------------------
# Suites.


def suite_cocycle(config: RunConfig) -> list[CheckResult]:
    rng = np.random.default_rng(config.seed)
    M = config.quadrature_points
    suite = _Suite(config)
    B = cocycle.unnormalized_cocycle(M)
    ident = diff.identity()

    pairs = [(diff.random_diffeo(rng), diff.random_diffeo(rng)) for _ in range(10)]
    left = max(abs(B(ident, g2)) for _, g2 in pairs)
    right = max(abs(B(g1, ident)) for g1, _ in pairs)
    suite.add("cocycle/normalization-left", "B(id, g) vanishes",
              left, 0.0, config.tol("cocycle_zero"))
    suite.add("cocycle/normalization-right", "B(g, id) vanishes",
              right, 0.0, config.tol("cocycle_zero"))
    rot = max(abs(B(g1, diff.rotation(0.9))) for g1, _ in pairs)
    suite.add("cocycle/rotation-right", "B(g, rotation) vanishes",
              rot, 0.0, config.tol("cocycle_zero"))

    variant = max(
        abs(cocycle.bott_original_R(g1, g2, M) - cocycle.bott_thurston_R(g1, g2, M))
        for g1, g2 in pairs
    )
    suite.add("cocycle/variant-agreement",
              "composite-derivative and split-log integrands agree",
              variant, 0.0, config.tol("variant_agreement"))

    self_pair = max(abs(B(g, g) - cocycle.bott_original_R(g, g, M)) for g, _ in pairs)
    suite.add("cocycle/self-pairing-exact",
              "integral of log(g') dlog(g') vanishes (exact form)",
              self_pair, 0.0, config.tol("self_pairing"))

    triples = [tuple(diff.random_diffeo(rng) for _ in range(3)) for _ in range(20)]
    worst = max(abs(cocycle.cocycle_defect(B, *t)) for t in triples)
    suite.add("cocycle/defect", f"2-cocycle identity defect at M={M}",
              worst, 0.0, config.tol("cocycle_defect"))

    rich = [
        (
            diff.compose(diff.random_diffeo(rng, modes=2, amplitude=0.16),
                         diff.random_diffeo(rng, modes=2, amplitude=0.16)),
            diff.random_diffeo(rng, modes=2, amplitude=0.16),
            diff.random_diffeo(rng, modes=2, amplitude=0.16),
        )
        for _ in range(5)
    ]
    coarse_M, fine_M = 16, 32
    coarse = max(abs(cocycle.cocycle_defect(cocycle.unnormalized_cocycle(coarse_M), *t))
                 for t in rich)
    fine = max(abs(cocycle.cocycle_defect(cocycle.unnormalized_cocycle(fine_M), *t))
               for t in rich)
    shrink = coarse / max(fine, 1e-300)
    suite.add("cocycle/defect-spectral-shrink",
              f"defect shrink factor from M={coarse_M} to M={fine_M}",
              shrink, config.tol("defect_shrink_factor"), 0.0,
              passed=shrink >= config.tol("defect_shrink_factor"))

    cob = cocycle.coboundary_cocycle(lambda g: math.sin(g(0.37)) + 0.5 * g.deriv(1.1))
    cob_worst = max(abs(cocycle.cocycle_defect(cob, *t)) for t in triples[:5])
    suite.add("cocycle/coboundary-defect", "coboundaries are cocycles",
              cob_worst, 0.0, 1e-10)

    g1, g2 = pairs[0]
    t_val = cocycle.bott_thurston_T(0.0, g1, g2, M)
    suite.add("cocycle/lambda-zero-trivial", "circle cocycle at lambda=0 is 1",
              abs(t_val - 1.0), 0.0, config.tol("unit_modulus"))
    mods = max(abs(abs(cocycle.bott_thurston_T(2.7, a, b, M)) - 1.0) for a, b in pairs)
    suite.add("cocycle/unit-modulus", "circle cocycle values lie on the unit circle",
              mods, 0.0, config.tol("unit_modulus"))
    lam = 3.3
    push = max(
        abs(cocycle.bott_thurston_T(lam, a, b, M)
            - cocycle.virasoro_cocycle(lam, M).circle_value(a, b))
        for a, b in pairs
    )
    suite.add("cocycle/pushout-consistency",
              "circle cocycle equals exponentiated real cocycle",
              push, 0.0, config.tol("pushout_consistency"))

    C = cocycle.virasoro_cocycle(1.0, M)
    e1 = cocycle.VirasoroElement(complex(1.0), pairs[0][0], C)
    e2 = cocycle.VirasoroElement(complex(1.0), pairs[0][1], C)
    e3 = cocycle.VirasoroElement(complex(1.0), pairs[1][0], C)
    lhs = cocycle.virasoro_mul(cocycle.virasoro_mul(e1, e2, C), e3, C)
    rhs = cocycle.virasoro_mul(e1, cocycle.virasoro_mul(e2, e3, C), C)
    grid = np.linspace(0.0, diff.TAU, 64)
    assoc = abs(lhs.phase - rhs.phase) + float(
        np.max(np.abs(lhs.gamma(grid) - rhs.gamma(grid)))
    )
    suite.add("cocycle/virasoro-associativity",
              "twisted multiplication is associative", assoc, 0.0,
              config.tol("group_law"))
    inv = cocycle.virasoro_mul(e1, cocycle.virasoro_inv(e1, C), C)
    inv_defect = abs(inv.phase - 1.0) + float(np.max(np.abs(inv.gamma(grid) - grid)))
    suite.add("cocycle/virasoro-inverse", "e * e^{-1} is the identity element",
              inv_defect, 0.0, config.tol("group_law"))
    return suite.checks


def suite_lemma(config: RunConfig) -> list[CheckResult]:
    suite = _Suite(config)
    res = simplicial.verify_main_lemma(samples=1000, seed=config.seed)
    suite.add("lemma/coboundary-identities",
              "max residual of the three coboundary identities (1000 samples)",
              res, 0.0, config.tol("lemma_residual"))

    mutated = simplicial.LemmaCochains(
        z1=simplicial.form_x1_dx2(),
        z2=simplicial.form_bott_thurston_integrand(),
        beta1=simplicial.LevelOneForm(
            0, 1, lambda pt, tan: np.log(pt.v) * tan.dxs[0], "+log(v) dx"
        ),
        beta2=simplicial.form_log_gamma_prime_dlog_v(),
    )
    res_mut = simplicial.verify_main_lemma(samples=100, seed=config.seed, cochains=mutated)
    suite.add("lemma/mutation-detected",
              "sign-flipped connecting cochain fails loudly",
              res_mut, config.tol("lemma_mutation_min"), 0.0,
              passed=res_mut > config.tol("lemma_mutation_min"))

    rng = np.random.default_rng(config.seed)
    fi = simplicial.fiber_integrate(
        simplicial.form_bott_thurston_integrand(), config.quadrature_points
    )
    worst = 0.0
    for _ in range(20):
        a, b = diff.random_diffeo(rng), diff.random_diffeo(rng)
        direct = cocycle.bott_thurston_R(a, b, config.quadrature_points)
        worst = max(worst, abs(fi(a, b) - direct) / max(abs(direct), 1e-12))
    suite.add("lemma/fiber-vs-direct",
              "fiber integration reproduces the direct quadrature",
              worst, 0.0, config.tol("fiber_vs_direct_rel"))

    dd = simplicial.coboundary(
        simplicial.VERTICAL,
        simplicial.coboundary(simplicial.VERTICAL, simplicial.form_minus_log_v_dx()),
    )
    worst_dd = 0.0
    for _ in range(50):
        pt, tan = simplicial.random_point_tangent(rng, 0, 3)
        worst_dd = max(worst_dd, abs(dd(pt, tan)))
    ddh = simplicial.coboundary(
        simplicial.HORIZONTAL,
        simplicial.coboundary(simplicial.HORIZONTAL, simplicial.form_log_gamma_prime_dlog_v()),
    )
    for _ in range(50):
        pt, tan = simplicial.random_point_tangent(rng, 3, 0)
        worst_dd = max(worst_dd, abs(ddh(pt, tan)))
    suite.add("lemma/double-coboundary", "d o d = 0 in each direction",
              worst_dd, 0.0, config.tol("double_coboundary"))
    return suite.checks


def suite_algebra(config: RunConfig) -> list[CheckResult]:
    suite = _Suite(config)
    b = witt.standard_cocycle(1)
    worst_nonzero = 0
    span = range(-10, 11)
    for m in span:
        for n in span:
            for k in span:
                d = witt.jacobi_defect(witt.L(m), witt.L(n), witt.L(k), b)
                if not d.is_zero():
                    worst_nonzero += 1
    suite.add("algebra/jacobi-standard",
              "standard diagonal cocycle: Jacobi defect count on |m| <= 10",
              worst_nonzero, 0.0, config.tol("jacobi"))

    from fractions import Fraction

    bad = witt.DiagonalCocycle(
        lambda m: Fraction(m * m * (m - 1), 12), check_antisymmetry=False
    )
    d = witt.jacobi_defect(witt.L(3), witt.L(-1), witt.L(-2), bad)
    suite.add("algebra/jacobi-nonantisymmetric-rule",
              "m^2(m-1) rule fails Jacobi (central defect shown)",
              float(d.central), 0.0, 0.0, passed=not d.is_zero())

    B = cocycle.unnormalized_cocycle(config.quadrature_points)
    extracted = witt.extracted_diagonal_cocycle(B, config.fd_step, config.fourier_order)
    res = witt.sl2_class_check(extracted)
    suite.add("algebra/sl2-residual",
              "extracted class has a representative vanishing on sl2 modes",
              res, 0.0, config.tol("sl2_residual_rel"))

    a12 = witt.cubic_coefficient(extracted.beta, (1, 2))
    a23 = witt.cubic_coefficient(extracted.beta, (2, 3))
    rel = abs(a12 - a23) / max(abs(a12), 1e-300)
    suite.add("algebra/cubic-window-stability",
              "cubic coefficient stable across fit windows (1,2) vs (2,3)",
              rel, 0.0, config.tol("cubic_window_rel"))
    return suite.checks


def suite_whitney(config: RunConfig) -> list[CheckResult]:
    suite = _Suite(config)
    rng = np.random.default_rng(config.seed)
    lam = chernweil.solve_whitney(rng=rng)
    suite.add("whitney/solved-lambda",
              "least-squares additivity scale is the distinguished lift",
              lam, 0.0, config.tol("whitney_lambda"))

    worst = 0.0
    for _ in range(100):
        A = rng.standard_normal((2, 2))
        Bm = rng.standard_normal((3, 3))
        lam_i = rng.uniform(-2.0, 2.0)
        d = chernweil.whitney_defect(lam_i, A, Bm)
        formula = -2.0 * lam_i * float(np.trace(A)) * float(np.trace(Bm))
        worst = max(worst, abs(d - formula))
    suite.add("whitney/defect-formula",
              "measured defect matches -2 lam tr(A) tr(B)",
              worst, 0.0, config.tol("whitney_formula"))

    zero_worst = max(
        abs(chernweil.whitney_defect(0.0, rng.standard_normal((2, 2)),
                                     rng.standard_normal((3, 3))))
        for _ in range(50)
    )
    suite.add("whitney/distinguished-additivity",
              "the lambda=0 lift is additive under block sums",
              zero_worst, 0.0, 1e-13)

    report = chernweil.restrict_to_so(chernweil.DifferentialLift(1.3, 4).polynomial(),
                                      rng=rng)
    suite.add("whitney/so-restriction",
              "tr(A)^2 dies on antisymmetric matrices",
              report.max_deviation, 0.0, 0.0, passed=report.passed)
    return suite.checks


SUITES = {
    "cocycle": suite_cocycle,
    "lemma": suite_lemma,
    "algebra": suite_algebra,
    "whitney": suite_whitney,
}


def run_verify(suite_name: str, config: RunConfig) -> dict:
    if suite_name == "all":
        checks = []
        for name in sorted(SUITES):
            checks.extend(SUITES[name](config))
    else:
        checks = SUITES[suite_name](config)
    return build_report(config, checks)


def _resolve_scale(scale_arg: str) -> float:
    if scale_arg == "p1hat":
        return chernweil.transgression_scale()
    return float(scale_arg)


def run_central_charge(scale_arg: str, config: RunConfig) -> dict:
    scale = _resolve_scale(scale_arg)
    transgressed = simplicial.transgress(scale, config.quadrature_points)
    computed = witt.central_charge(
        transgressed, config.fd_step, order=config.fourier_order
    )
    expected = -96.0 * math.pi**2 * scale
    if expected == 0.0:
        tol = config.tol("central_charge_abs")
        passed = abs(computed) <= tol
    else:
        tol = config.tol("central_charge_rel")
        passed = abs(computed - expected) <= tol * abs(expected)
    suite = _Suite(config)
    suite.add(
        f"central-charge/{scale_arg}",
        f"central charge of the transgressed cocycle at scale {scale!r}",
        computed, expected, tol, passed=passed,
    )
    return build_report(config, suite.checks)


def run_sweep(parameter: str, values: list[float], config: RunConfig) -> tuple[dict, list[dict]]:
    suite = _Suite(config)
    rows = []
    if parameter == "lambda":
        for scale in values:
            transgressed = simplicial.transgress(scale, config.quadrature_points)
            charge = witt.central_charge(
                transgressed, config.fd_step, order=config.fourier_order
            )
            expected = -96.0 * math.pi**2 * scale
            if expected == 0.0:
                ok = abs(charge) <= config.tol("central_charge_abs")
                tol = config.tol("central_charge_abs")
            else:
                ok = abs(charge - expected) <= config.tol("sweep_linearity_rel") * abs(expected)
                tol = config.tol("sweep_linearity_rel")
            rows.append({"parameter": "lambda", "value": scale, "computed": charge,
                         "expected": expected, "passed": ok})
            suite.add(f"sweep/lambda={scale!r}",
                      "central charge is linear in the transgression scale",
                      charge, expected, tol, passed=ok)
    else:  # resolution
        rng = np.random.default_rng(config.seed)
        triples = [
            (
                diff.compose(diff.random_diffeo(rng, modes=2, amplitude=0.16),
                             diff.random_diffeo(rng, modes=2, amplitude=0.16)),
                diff.random_diffeo(rng, modes=2, amplitude=0.16),
                diff.random_diffeo(rng, modes=2, amplitude=0.16),
            )
            for _ in range(5)
        ]
        defects = []
        for res in values:
            B = cocycle.unnormalized_cocycle(int(res))
            worst = max(abs(cocycle.cocycle_defect(B, *t)) for t in triples)
            defects.append(worst)
            rows.append({"parameter": "resolution", "value": int(res),
                         "computed": worst, "expected": 0.0, "passed": True})
        floor = 1e-12
        monotone = all(
            b <= a * 1.05 + floor for a, b in zip(defects, defects[1:])
        )
        suite.add("sweep/resolution-monotone",
                  "cocycle defect does not grow as the resolution doubles",
                  float(defects[-1]), float(defects[0]), floor, passed=monotone)
        for value, worst in zip(values, defects):
            suite.add(f"sweep/resolution={int(value)}",
                      "worst 2-cocycle defect at this resolution",
                      worst, 0.0, config.tol("cocycle_defect"),
                      passed=True)
    return build_report(config, suite.checks), rows


def write_sweep_csv(rows: list[dict], path: Path):
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["parameter", "value", "computed", "expected", "passed"]
        )
        writer.writeheader()
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# Argument handling.


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--fourier-order", type=int, default=diff.DEFAULT_ORDER)
    parser.add_argument("--quadrature-points", type=int,
                        default=cocycle.DEFAULT_RESOLUTION)
    parser.add_argument("--fd-step", type=float, default=1e-3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tolerance", action="append", default=[],
                        metavar="NAME=VALUE", help="override a named tolerance")
    parser.add_argument("--report", default=None, metavar="PATH",
                        help="write the JSON report here instead of stdout")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit wall-clock data for byte-identical reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="virasoro-verify",
        description="Verification suites for the transgressed Virasoro extensions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a named check suite")
    p_verify.add_argument("suite", choices=sorted(SUITES) + ["all"])
    _add_common(p_verify)

    p_cc = sub.add_parser("central-charge", help="transgress and measure")
    p_cc.add_argument("scale", help="transgression scale (float) or 'p1hat'")
    _add_common(p_cc)

    p_sweep = sub.add_parser("sweep", help="tabulate across a parameter range")
    p_sweep.add_argument("parameter", choices=["lambda", "resolution"])
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated parameter values")
    _add_common(p_sweep)
    return parser


def _config_from_args(args) -> RunConfig:
    tolerances = {}
    for item in args.tolerance:
        name, _, value = item.partition("=")
        if not _ or not value:
            raise ValueError(f"malformed tolerance override {item!r}")
        tolerances[name] = float(value)
    return RunConfig(
        fourier_order=args.fourier_order,
        quadrature_points=args.quadrature_points,
        fd_step=args.fd_step,
        seed=args.seed,
        tolerances=tolerances,
        report_path=args.report,
        no_timestamp=args.no_timestamp,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_ERROR
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    if args.command == "verify":
        report = run_verify(args.suite, config)
    elif args.command == "central-charge":
        try:
            _resolve_scale(args.scale)
        except ValueError:
            print(f"error: scale must be a float or 'p1hat', got {args.scale!r}",
                  file=sys.stderr)
            return USAGE_ERROR
        report = run_central_charge(args.scale, config)
    else:
        try:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            print(f"error: malformed --values {args.values!r}", file=sys.stderr)
            return USAGE_ERROR
        if not values:
            print("error: empty sweep range", file=sys.stderr)
            return USAGE_ERROR
        report, rows = run_sweep(args.parameter, values, config)
        csv_path = (
            Path(config.report_path).with_suffix(".csv")
            if config.report_path
            else Path("sweep.csv")
        )
        write_sweep_csv(rows, csv_path)

    emit_report(report, config)
    return 0 if report["summary"]["passed"] else 1


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
