"""Radial moment problem ``int J**n dnu = eps_n! d(n)``.

Closed-form measures are shipped where they are known.  Otherwise the density
is written as ``f(x) = exp(-x) * sum d_n L_n(x)`` with Laguerre coefficients
computed in exact rational arithmetic; the alternating sum that produces them
cancels catastrophically in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import trapezoid
from scipy.special import roots_laguerre, roots_legendre

from .errors import NoClosedForm, PrecisionLoss, QuadratureFailure, TestFunctionOutOfClass
from .spectrum import DegeneracySequence, EnergySpectrum, eps_factorial

__all__ = [
    "LaguerreSeries",
    "RadialMeasure",
    "TestFunction",
    "MomentReport",
    "PairingResult",
    "DensityValue",
    "target_moments",
    "exact_targets",
    "laguerre_coefficients",
    "laguerre_values",
    "density_eval",
    "verify_moments",
    "weak_pairing",
    "pairing_bound",
    "closed_form_measure",
    "LAGUERRE_NODES",
    "LEGENDRE_NODES",
]

LAGUERRE_NODES = 128
LEGENDRE_NODES = 64


@lru_cache(maxsize=None)
def _laguerre_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_laguerre(nodes)
    return x, w


@lru_cache(maxsize=None)
def _legendre_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(nodes)
    return x, w


def laguerre_values(x, N: int) -> np.ndarray:
    """``L_0(x) .. L_N(x)`` by the three-term recurrence; shape ``(N+1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((N + 1,) + x.shape)
    out[0] = 1.0
    if N >= 1:
        out[1] = 1.0 - x
    for n in range(1, N):
        out[n + 1] = ((2 * n + 1 - x) * out[n] - n * out[n - 1]) / (n + 1)
    return out


def _to_fraction(value, allow_float_lift: bool) -> Fraction:
    if isinstance(value, (Rational, Fraction)):
        return Fraction(value)
    value = float(value)
    if value.is_integer():
        return Fraction(int(value))
    if allow_float_lift:
        return Fraction(value)
    raise PrecisionLoss(f"target {value!r} is not an integer; pass allow_float_lift=True to use its binary value")


@dataclass(frozen=True)
class LaguerreSeries:
    """Coefficients ``d_0 .. d_N`` of ``f~(x) = sum d_n L_n(x)``, kept as Fractions."""

    coefficients: tuple[Fraction, ...]
    orthonormality_residual: float = math.nan

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1

    @cached_property
    def floats(self) -> np.ndarray:
        return np.array([float(d) for d in self.coefficients])

    def tilde(self, x) -> np.ndarray:
        """``f~_N(x)``, the density with the ``exp(-x)`` weight removed."""
        return np.tensordot(self.floats, laguerre_values(x, self.N), axes=1)

    def truncate(self, M: int) -> LaguerreSeries:
        return LaguerreSeries(self.coefficients[: M + 1], self.orthonormality_residual)

    def to_list(self) -> list[str]:
        return [str(d) for d in self.coefficients]


def target_moments(spec: EnergySpectrum, deg: DegeneracySequence, n: int) -> float:
    """``rho_n = eps_n! * d(n)``."""
    return eps_factorial(spec, n) * deg(n)


def exact_targets(
    spec: EnergySpectrum,
    deg: DegeneracySequence,
    n_max: int,
    allow_float_lift: bool = False,
) -> list[Fraction]:
    """``rho_0 .. rho_{n_max}`` as exact rationals built from the levels."""
    spec.require_shifted()
    out = []
    fact = Fraction(1)
    for n in range(n_max + 1):
        if n:
            fact *= _to_fraction(spec.eps(n), allow_float_lift)
        out.append(fact * deg(n))
    return out


def _orthonormality_residual(N: int, nodes: int = 64) -> float:
    x, w = _laguerre_rule(nodes)
    L = laguerre_values(x, N)
    gram = (L * w) @ L.T
    return float(np.max(np.abs(gram - np.eye(N + 1))))


def laguerre_coefficients(targets: Sequence, allow_float_lift: bool = False) -> LaguerreSeries:
    """``d_n = sum_k C(n,k) (-1)**k rho_k / k!`` in exact arithmetic."""
    rho = [_to_fraction(t, allow_float_lift) for t in targets]
    scaled = [r / math.factorial(k) for k, r in enumerate(rho)]
    coeffs = []
    for n in range(len(rho)):
        coeffs.append(sum((math.comb(n, k) * (-1) ** k * scaled[k] for k in range(n + 1)), Fraction(0)))
    N = len(coeffs) - 1
    return LaguerreSeries(tuple(coeffs), _orthonormality_residual(min(N, 12)))


class DensityValue(NamedTuple):
    value: float | np.ndarray
    truncated: bool  # the series is a partial sum of a possibly divergent expansion


def density_eval(series: LaguerreSeries, x) -> DensityValue:
    """``f_N(x) = exp(-x) * sum_{n <= N} d_n L_n(x)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("density is defined on x >= 0")
    val = np.exp(-x) * series.tilde(x)
    return DensityValue(val if val.ndim else float(val), True)


@dataclass(frozen=True)
class RadialMeasure:
    """Signed measure on ``[0, L)``: density plus point masses.

    ``family`` is ``gamma`` (``c J**a exp(-J)``), ``power`` (``c J**a`` on a
    finite interval) or ``laguerre`` (``exp(-J) f~_N(J)``).
    """

    support: float = math.inf
    family: str = "gamma"
    params: dict = field(default_factory=dict, hash=False)
    atoms: tuple[tuple[float, float], ...] = ()
    series: LaguerreSeries | None = None
    weak_only: bool = False
    note: str = ""

    @classmethod
    def gamma(cls, c: float = 1.0, a: float = 0.0, atoms=(), note: str = "") -> RadialMeasure:
        return cls(math.inf, "gamma", {"c": c, "a": a}, tuple(tuple(p) for p in atoms), note=note)

    @classmethod
    def power(cls, L: float, a: float = 0.0) -> RadialMeasure:
        """Normalized ``(a+1) J**a / L**(a+1)`` on ``[0, L)``; pairs with ``EnergySpectrum.bounded``."""
        return cls(float(L), "power", {"c": (a + 1) / L ** (a + 1), "a": a})

    @classmethod
    def laguerre(cls, series: LaguerreSeries, note: str = "") -> RadialMeasure:
        return cls(math.inf, "laguerre", {"N": series.N}, (), series, True, note)

    def weighted_density(self, x: np.ndarray) -> np.ndarray:
        """Density divided by the quadrature weight (``exp(-x)`` on infinite support)."""
        x = np.asarray(x, dtype=float)
        if self.family == "laguerre":
            return self.series.tilde(x)
        c, a = self.params["c"], self.params["a"]
        return c * x**a

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if math.isinf(self.support):
            return np.exp(-x) * self.weighted_density(x)
        return np.where(x < self.support, self.weighted_density(x), 0.0)

    @cached_property
    def nonpositive_somewhere(self) -> bool:
        if any(w < 0 for _, w in self.atoms):
            return True
        if self.family == "laguerre":
            grid = np.linspace(0.0, 60.0, 6001)
            return bool(np.any(self.weighted_density(grid) < 0))
        return self.params["c"] < 0

    def moment(self, n: int, nodes: int | None = None) -> float:
        """``int J**n dnu`` by Gauss quadrature plus the atoms."""
        if math.isinf(self.support):
            x, w = _laguerre_rule(nodes or LAGUERRE_NODES)
            smooth = float(np.sum(w * x**n * self.weighted_density(x)))
        else:
            t, w = _legendre_rule(nodes or LEGENDRE_NODES)
            half = 0.5 * self.support
            x = half * (t + 1.0)
            smooth = float(half * np.sum(w * x**n * self.weighted_density(x)))
        return smooth + sum(wt * loc**n for loc, wt in self.atoms)

    def to_dict(self) -> dict:
        if self.family == "laguerre":
            density = {"laguerre": self.series.to_list()}
        else:
            density = {"family": self.family, "params": dict(self.params)}
        return {
            "support": "inf" if math.isinf(self.support) else self.support,
            "density": density,
            "atoms": [list(a) for a in self.atoms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> RadialMeasure:
        support = math.inf if data["support"] == "inf" else float(data["support"])
        dens = data["density"]
        atoms = tuple(tuple(float(v) for v in a) for a in data.get("atoms", []))
        if "laguerre" in dens:
            series = LaguerreSeries(tuple(Fraction(d) for d in dens["laguerre"]))
            return cls.laguerre(series)
        return cls(support, dens["family"], dict(dens["params"]), atoms)


class MomentReport(NamedTuple):
    moments: np.ndarray
    targets: np.ndarray
    rel_errors: np.ndarray
    nodes: int
    tol: float
    passed: bool


def verify_moments(
    measure: RadialMeasure,
    spec: EnergySpectrum,
    deg: DegeneracySequence,
    n_max: int,
    nodes: int | None = None,
    tol: float = 1e-8,
) -> MomentReport:
    """Compare quadrature moments with ``eps_n! d(n)`` for ``n <= n_max``.

    Every moment is also computed with twice the nodes; if the two rules
    disagree beyond ``tol`` the quadrature itself is not trustworthy and
    QuadratureFailure is raised.
    """
    if nodes is None:
        nodes = LAGUERRE_NODES if math.isinf(measure.support) else LEGENDRE_NODES
    L = spec.radius.value
    if math.isinf(measure.support) != math.isinf(L) or (
        not math.isinf(L) and abs(measure.support - L) > 1e-12 * L
    ):
        raise ValueError(f"measure support {measure.support} does not match radius {L}")
    targets = np.array([target_moments(spec, deg, n) for n in range(n_max + 1)])
    moments = np.array([measure.moment(n, nodes) for n in range(n_max + 1)])
    fine = np.array([measure.moment(n, 2 * nodes) for n in range(n_max + 1)])
    drift = np.abs(moments - fine) / np.abs(targets)
    if np.any(drift > tol):
        n = int(np.argmax(drift))
        raise QuadratureFailure(f"moment {n}: {nodes} and {2 * nodes} node rules differ by {drift[n]:.3g} (relative)")
    rel = np.abs(moments - targets) / np.abs(targets)
    return MomentReport(moments, targets, rel, nodes, tol, bool(np.all(rel <= tol)))


_TEST_FUNCTION_KMAX = 8


@lru_cache(maxsize=None)
def _bump_numerator(k: int) -> Polynomial:
    """``P_k`` with ``g^(k)(u) = g(u) P_k(u) / (1-u^2)^(2k)`` for ``g = exp(-1/(1-u^2))``."""
    if k == 0:
        return Polynomial([1.0])
    p = _bump_numerator(k - 1)
    j = k - 1
    u = Polynomial([0.0, 1.0])
    one_minus = Polynomial([1.0, 0.0, -1.0])
    return -2 * u * p + one_minus**2 * p.deriv() + 4 * j * u * one_minus * p


def _bump_derivative(k: int, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    s = 1.0 - u[inside] ** 2
    out[inside] = np.exp(-1.0 / s - 2 * k * np.log(s)) * _bump_numerator(k)(u[inside])
    return out


@dataclass(frozen=True)
class TestFunction:
    """Scaled bump ``scale * exp(-1/(1-u^2))``, ``u = (x - center) / half_width``.

    Membership in the class of smooth functions on ``[0, 1]`` whose
    derivatives have L1 norm at most one is certified for ``k <= k_max`` only.
    """

    __test__ = False

    center: float = 0.5
    half_width: float = 0.5
    scale: float = 1.0

    def __post_init__(self):
        if self.half_width <= 0 or self.center - self.half_width < 0 or self.center + self.half_width > 1:
            raise ValueError("bump support must lie inside [0, 1]")

    @classmethod
    def normalized(cls, center: float = 0.5, half_width: float = 0.5, k_max: int = _TEST_FUNCTION_KMAX) -> TestFunction:
        """Largest scale (less a 1e-4 margin for the integration error) meeting the L1 bounds up to ``k_max``."""
        raw = cls(center, half_width, 1.0)
        return cls(center, half_width, (1 - 1e-4) / float(np.max(raw.derivative_norms(k_max))))

    def derivative(self, k: int, x) -> np.ndarray:
        u = (np.asarray(x, dtype=float) - self.center) / self.half_width
        return self.scale * self.half_width ** (-k) * _bump_derivative(k, u)

    def __call__(self, x) -> np.ndarray:
        return self.derivative(0, x)

    def derivative_norms(self, k_max: int = _TEST_FUNCTION_KMAX, points: int = 200001) -> np.ndarray:
        """``int_0^1 |phi^(k)| dx`` for ``k = 0..k_max``."""
        x = np.linspace(self.center - self.half_width, self.center + self.half_width, points)
        return np.array([trapezoid(np.abs(self.derivative(k, x)), x) for k in range(k_max + 1)])

    def in_class(self, k_max: int = _TEST_FUNCTION_KMAX) -> bool:
        return bool(np.all(self.derivative_norms(k_max) <= 1.0))


class PairingResult(NamedTuple):
    value: float
    bound: float
    quad_error: float
    ok: bool


def pairing_bound(series: LaguerreSeries, M: int, N: int) -> float:
    """``sum_{n=M+1}^{N} |d_n| 2**n / n!``."""
    return float(sum(abs(series.coefficients[n]) * Fraction(2**n, math.factorial(n)) for n in range(M + 1, N + 1)))


def weak_pairing(
    series_N: LaguerreSeries,
    series_M: LaguerreSeries,
    phi: TestFunction,
    nodes: int = LEGENDRE_NODES,
    k_max: int = _TEST_FUNCTION_KMAX,
) -> PairingResult:
    """``int_0^1 (f~_N - f~_M) phi dx`` against its analytic bound."""
    N, M = series_N.N, series_M.N
    if N < M:
        raise ValueError("need N >= M")
    if series_N.coefficients[: M + 1] != series_M.coefficients:
        raise ValueError("series_M must be a truncation of series_N")
    if not phi.in_class(k_max):
        raise TestFunctionOutOfClass(f"derivative norms exceed 1 for some k <= {k_max}")
    if N == M:
        return PairingResult(0.0, 0.0, 0.0, True)

    def integral(n_nodes: int) -> float:
        t, w = _legendre_rule(n_nodes)
        x = phi.center + phi.half_width * t
        diff = series_N.tilde(x) - series_M.tilde(x)
        return float(phi.half_width * np.sum(w * diff * phi(x)))

    value = integral(nodes)
    quad_error = abs(value - integral(2 * nodes))
    bound = pairing_bound(series_N, M, N)
    return PairingResult(value, bound, quad_error, abs(value) <= bound + quad_error)


_CLOSED_FORMS = {
    "gk-linear": lambda: RadialMeasure.gamma(1.0, 0.0),
    "example1": lambda: RadialMeasure.gamma(2.0, 0.0, atoms=[(0.0, -1.0)]),
    "example3": lambda: RadialMeasure.gamma(
        0.5, 2.0, note="J = r^2 turns r^5 dr/(4 pi^2) with the normalization absorbed into J^2 exp(-J)/2"
    ),
    "boson-two-fermion": lambda: RadialMeasure.gamma(1.0, 0.0, note="same measure on every branch"),
    "two-fermion-hermitian": lambda: RadialMeasure.gamma(1.0, 0.0, note="same measure on every branch"),
}


def closed_form_measure(model_tag: str) -> RadialMeasure:
    try:
        return _CLOSED_FORMS[model_tag]()
    except KeyError:
        raise NoClosedForm(f"no closed-form measure for {model_tag!r}; use laguerre_coefficients") from None
