"""Reproducing kernels and resolution-of-identity checks.

The angle measure over the real line is never built.  Its only job is to
average ``exp(i (a - b) gamma)`` over long windows, which gives the Kronecker
delta on frequencies; :func:`phase_average` applies that rule exactly.  With it
every off-diagonal term of a resolution of identity vanishes analytically and
the check reduces to the moment ratios ``r_n = int J**n dnu / (eps_n! d(n))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .measures import RadialMeasure, verify_moments
from .spectrum import BranchSet, DegeneracySequence, EnergySpectrum, series_terms
from .states import branch_vcs

__all__ = [
    "KernelValue",
    "ResolutionReport",
    "IdempotencyReport",
    "phase_average",
    "theta_average",
    "finite_window_average",
    "kernel_eval",
    "kernel_gram",
    "matrix_kernel",
    "reproduced_kernel",
    "kernel_idempotency",
    "resolution_check",
]


def phase_average(eps_a: float, eps_b: float, tol: float = 0.0) -> int:
    """Long-window mean of ``exp(i (eps_a - eps_b) gamma)``: 1 on matching frequencies, else 0."""
    return 1 if abs(eps_a - eps_b) <= tol else 0


def theta_average(j: int, k: int) -> int:
    """Mean of ``exp(i (j - k) theta)`` over one period; exact for integer labels."""
    return 1 if j == k else 0


def finite_window_average(eps_a: float, eps_b: float, T: float) -> float:
    """``(1/2T) int_{-T}^{T} exp(i delta gamma) dgamma = sin(delta T) / (delta T)``.

    Diagnostic only: shows how slowly incommensurate frequencies decouple.
    """
    return float(np.sinc((eps_a - eps_b) * T / math.pi))


@dataclass(frozen=True)
class KernelValue:
    value: complex
    x: tuple[float, float]
    y: tuple[float, float]
    depth: int
    tail_bound: float  # relative to the sum of moduli of the retained terms


def _log(J: float) -> float:
    if J < 0:
        raise ValueError(f"J must be >= 0, got {J}")
    return -math.inf if J == 0 else math.log(J)


def kernel_eval(
    spec: EnergySpectrum,
    x: tuple[float, float],
    y: tuple[float, float],
    tol: float = 1e-14,
) -> KernelValue:
    """``K(x, y) = sum_n (J J')**(n/2) exp(i eps_n (gamma - gamma')) / eps_n!``.

    Uses the same series as :func:`normalization`, so ``K(x, x)`` reproduces
    ``N(J)`` bit for bit.
    """
    (J, g), (J2, g2) = x, y
    log_s = 0.5 * (_log(J) + _log(J2))
    s = series_terms(spec, log_s, tol)
    t = s.terms
    phase = s.levels * (g - g2)
    value = complex(float(np.sum(t * np.cos(phase))), float(np.sum(t * np.sin(phase))))
    return KernelValue(value, (J, g), (J2, g2), s.depth, s.tail_bound)


def kernel_gram(spec: EnergySpectrum, points: Sequence[tuple[float, float]], tol: float = 1e-14) -> np.ndarray:
    """``[K(x_i, x_j)]`` over a sample of points."""
    n = len(points)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = kernel_eval(spec, points[i], points[j], tol).value
    return G


def matrix_kernel(
    branches: BranchSet,
    x: tuple[Sequence[float], Sequence[float]],
    y: tuple[Sequence[float], Sequence[float]],
    tol: float = 1e-14,
) -> np.ndarray:
    """Entry ``(j, k)`` is ``<x; j | y; k>`` for the branch vector states."""
    N = branches.N
    left = [branch_vcs(branches, j, x[0], x[1], tol) for j in range(N)]
    right = [branch_vcs(branches, k, y[0], y[1], tol) for k in range(N)]
    return np.array([[left[j].inner(right[k]) for k in range(N)] for j in range(N)])


def reproduced_kernel(psi_x, psi_y, levels, ratios, tol: float = 0.0):
    """``sum_{n,m} psi_x[n] conj(psi_y[m]) <phase average> r_n``.

    This is ``int K(x, z) K(z, y)`` after the angle average; ``r_n`` is the
    moment ratio.  Pure Python so it also runs on Fractions.
    """
    total = 0
    for n in range(len(psi_x)):
        for m in range(len(psi_y)):
            if phase_average(levels[n], levels[m], tol):
                total += psi_x[n] * psi_y[m].conjugate() * ratios[n]
    return total


class IdempotencyReport(NamedTuple):
    residuals: np.ndarray
    max_residual: float
    passed: bool


def _kernel_vector(spec: EnergySpectrum, J: float, gamma: float, depth: int) -> np.ndarray:
    lev = spec.levels(depth)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(lev[1:]))])
    n = np.arange(lev.size)
    if J == 0:
        mod = (n == 0).astype(float)
    else:
        mod = np.exp(0.5 * (n * math.log(J) - log_fact))
    return mod * np.exp(1j * lev * gamma)


def kernel_idempotency(
    spec: EnergySpectrum,
    points: Sequence[tuple[float, float]],
    measure: RadialMeasure,
    deg: DegeneracySequence | None = None,
    nodes: int | None = None,
    tol: float = 1e-10,
) -> IdempotencyReport:
    """Max relative residual of ``K(x, y) = int K(x, z) K(z, y)`` over all point pairs.

    Points are ``(J, gamma)``; with a degeneracy the second angle is taken at
    zero for every point.
    """
    deg = deg or DegeneracySequence.constant()
    depth = max(series_terms(spec, _log(J), 1e-16).depth for J, _ in points) + 2
    depth = spec.max_index(depth)
    report = verify_moments(measure, spec, deg, depth, nodes, tol=math.inf)
    # summing the d(n) labels of a level cancels the 1/d(n) in each term
    ratios = report.moments / report.targets
    levels = spec.levels(depth)
    vecs = [_kernel_vector(spec, J, g, depth) for J, g in points]
    res = []
    for i, x in enumerate(points):
        for j, y in enumerate(points):
            lhs = kernel_eval(spec, x, y).value
            rhs = reproduced_kernel(vecs[i], vecs[j], levels, ratios)
            res.append(abs(lhs - rhs) / max(1.0, abs(lhs)))
    res = np.array(res)
    return IdempotencyReport(res, float(res.max()), bool(res.max() <= tol))


@dataclass(frozen=True)
class ResolutionReport:
    """Diagonal moment ratios per branch (a single entry for scalar models)."""

    model: str
    ratios: dict[str, list[float]]
    max_deviation: float
    offdiag_residual: float
    status: str  # pass | fail | weak-sense-only
    nodes: int
    tol: float
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "ratios": self.ratios,
            "max_deviation": self.max_deviation,
            "offdiag_residual": self.offdiag_residual,
            "status": self.status,
            "nodes": self.nodes,
            "tol": self.tol,
            "notes": list(self.notes),
        }


def _offdiag(levels: np.ndarray, deg: DegeneracySequence, moments: np.ndarray) -> float:
    """Largest surviving off-diagonal term, by the analytic averaging rules."""
    worst = 0.0
    n_max = levels.size - 1
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            if n != m:
                worst = max(worst, phase_average(levels[n], levels[m]) * abs(moments[n]))
        d = deg(n)
        for j in range(1, d + 1):
            for k in range(1, d + 1):
                if j != k:
                    worst = max(worst, theta_average(j, k) * abs(moments[n]))
    return float(worst)


def resolution_check(model, n_max: int = 10, nodes: int | None = None, tol: float = 1e-8) -> ResolutionReport:
    """Verify the resolution of identity of ``model`` through the ratios ``r_n``.

    ``model`` needs ``tag``, ``degeneracy``, ``measure`` and either
    ``spectrum`` or ``branches``.  Branch models are checked branch by branch;
    cross-branch terms vanish because each branch state has its own support.
    A weak-only measure (Laguerre partial sums) is reported with status
    ``weak-sense-only``; its ratios are diagnostics.
    """
    if getattr(model, "branches", None) is not None:
        specs = list(model.branches.branches)
        names = list(model.branches.labels)
    else:
        specs = [model.spectrum]
        names = [model.tag]
    measure = model.measure
    deg = model.degeneracy
    ratios = {}
    worst = 0.0
    offdiag = 0.0
    used = nodes
    notes = []
    for name, spec in zip(names, specs):
        rep = verify_moments(measure, spec, deg, n_max, nodes, tol=math.inf if measure.weak_only else tol)
        r = rep.moments / rep.targets
        ratios[name] = r.tolist()
        worst = max(worst, float(np.max(np.abs(r - 1))))
        offdiag = max(offdiag, _offdiag(spec.levels(n_max), deg, rep.moments))
        used = rep.nodes
    if measure.weak_only:
        status = "weak-sense-only"
        notes.append("density is a Laguerre partial sum; only weak pairings against test functions are claimed")
    else:
        status = "pass" if worst <= tol and offdiag <= tol else "fail"
    if measure.nonpositive_somewhere:
        notes.append("measure is signed")
    return ResolutionReport(model.tag, ratios, worst, offdiag, status, used, tol, notes)
