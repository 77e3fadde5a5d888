"""Regression oracles: the circle, the round 2-sphere, the cubic torus, flat tori.

Each :class:`OracleCase` pairs a Sturm-Liouville problem with eigenvalues
known independently of the shooting solver.  ``run_all`` checks them and
collects per-case errors without stopping at the first failure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sturm import CoefficientModel, SLProblem, eigenvalues

SPHERE2_TABLE = (2, 12, 30, 56, 90, 132, 182, 240, 306, 380, 462, 552, 650)


@dataclass(frozen=True)
class OracleCase:
    name: str
    problem: SLProblem
    h: float
    expected: tuple  # ((value, provenance), ...)
    tol: float
    warnings: tuple = ()

    def values(self):
        return [v for v, _ in self.expected]


def _flat(T, label):
    return SLProblem.from_model(CoefficientModel(curvature=0, delta=0.0, upsilon=0.0, power=0), T, label)


def circle_case(count=10) -> OracleCase:
    """Unit circle: h = 2/pi, J = 1, T = pi/2, lam_k = (2k-1)^2."""
    note = ("reference sequence (1+2k)^2 starts at 9, but u = sin(tau) already solves the "
            "problem with lam = 1; the closed form (2k-1)^2 is used")
    return OracleCase(
        name="circle",
        problem=_flat(math.pi / 2, "circle"),
        h=2 / math.pi,
        expected=tuple(((2 * k - 1) ** 2, "closed form sin((2k-1)tau)") for k in range(1, count + 1)),
        tol=1e-9,
        warnings=(note,),
    )


def sphere2_case() -> OracleCase:
    """Round 2-sphere: h = 1, p = w = cos(tau) on (0, pi/2)."""
    return OracleCase(
        name="sphere2",
        problem=SLProblem.from_model(
            CoefficientModel(curvature=1, delta=1.0, upsilon=0.0, power=1), math.pi / 2, "sphere2"),
        h=1.0,
        expected=tuple((float(v), "SLEIGN2 table") for v in SPHERE2_TABLE),
        tol=1e-6,
    )


def torus_case(count=10) -> OracleCase:
    """Cubic torus R^n/Z^n: h = 4, J = 1, T = 1/4, lam_k = (2 pi (2k-1))^2."""
    note = ("reference sequence (2 pi (1+2k))^2 is offset by one index from the closed form "
            "(2 pi (2k-1))^2; the closed form is used")
    return OracleCase(
        name="torus",
        problem=_flat(0.25, "torus"),
        h=4.0,
        expected=tuple(((2 * math.pi * (2 * k - 1)) ** 2, "closed form sin(2pi(2k-1)tau)")
                       for k in range(1, count + 1)),
        tol=1e-9,
        warnings=(note,),
    )


CASES = {"circle": circle_case, "sphere2": sphere2_case, "torus": torus_case}


def flat_torus_spectrum(i, count):
    """First ``count`` eigenvalues (with multiplicity, from 0) of R^2 / A_i Z^2.

    The spectrum is 4 pi^2 ((2^(i-1) x1)^2 + x2^2) over integer (x1, x2).
    The box is enlarged until every lattice point outside it exceeds the
    largest returned value.
    """
    if i < 1 or count < 1:
        raise ValueError("need i >= 1 and count >= 1")
    stretch = 2 ** (i - 1)
    half = int(math.ceil(math.sqrt(count))) + 2
    while True:
        r = np.arange(-half, half + 1)
        x1, x2 = np.meshgrid(r, r, indexing="ij")
        lam = 4 * math.pi ** 2 * ((stretch * x1) ** 2 + x2 ** 2)
        vals = np.sort(lam.ravel())[:count]
        outside = 4 * math.pi ** 2 * (half + 1) ** 2  # smallest value off the box
        if vals.size == count and vals[-1] < outside:
            return vals
        half = int(math.ceil(math.sqrt(vals[-1]) / (2 * math.pi))) + 2 if vals.size == count else 2 * half


@dataclass
class CaseResult:
    name: str
    rows: list  # (k, expected, computed, rel_err, ok)
    max_rel_err: float
    passed: bool
    warnings: tuple = ()
    error: str | None = None


@dataclass
class ValidationReport:
    results: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    @property
    def failing(self):
        return [r.name for r in self.results if not r.passed]

    def table(self):
        lines = [f"{'case':<8} {'k':>3} {'expected':>22} {'computed':>22} {'rel-error':>10} status"]
        for res in self.results:
            if res.error:
                lines.append(f"{res.name:<8} {'-':>3} {'-':>22} {'-':>22} {'-':>10} ERROR {res.error}")
            for k, exp, got, err, ok in res.rows:
                lines.append(f"{res.name:<8} {k:>3d} {exp:>22.12f} {got:>22.12f} {err:>10.2e} "
                             f"{'pass' if ok else 'FAIL'}")
            for w in res.warnings:
                lines.append(f"warning [{res.name}]: {w}")
        return "\n".join(lines)


def check_case(case: OracleCase, tol=None) -> CaseResult:
    tol = case.tol if tol is None else tol
    try:
        got = eigenvalues(case.problem, len(case.expected))
    except Exception as exc:  # report, never abort the suite
        return CaseResult(case.name, [], math.inf, False, case.warnings, f"{type(exc).__name__}: {exc}")
    rows = []
    for k, ((exp, _), val) in enumerate(zip(case.expected, got), start=1):
        err = abs(val - exp) / abs(exp)
        rows.append((k, exp, val, err, err <= tol))
    worst = max(r[3] for r in rows)
    return CaseResult(case.name, rows, worst, all(r[4] for r in rows), case.warnings)


def run_all(tolerances=None, cases=None) -> ValidationReport:
    """Run every oracle case.  ``tolerances`` maps case name (or ``"*"``) to a relative tolerance."""
    tolerances = tolerances or {}
    report = ValidationReport()
    for name in cases or CASES:
        case = CASES[name]()
        tol = tolerances.get(name, tolerances.get("*"))
        report.results.append(check_case(case, tol))
    return report
