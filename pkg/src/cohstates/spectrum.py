"""Discrete spectra, degeneracies and the series every construction is built on.

A spectrum is a lazy rule ``n -> eps_n`` (dimensionless) together with an
energy scale ``omega``.  Levels of a ket are ``omega * eps_n``.  Explicit
lists are wrapped as finite spectra.

All ratios ``J**n / eps_n!`` are formed in log space and exponentiated at the
end, so very deep truncations do not overflow.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    NonConvergent,
    NonMonotoneSpectrum,
    OutsideConvergenceDomain,
    UnshiftedSpectrum,
)

__all__ = [
    "EnergySpectrum",
    "DegeneracySequence",
    "BranchSet",
    "SeriesTerms",
    "Normalization",
    "RadiusEstimate",
    "eps_factorial",
    "log_eps_factorial",
    "shift_to_zero",
    "radius_of_convergence",
    "normalization",
    "series_terms",
]

# running products above this switch to log space
LOG_SWITCH = 1e280
# hard budget for adaptive truncation
MAX_TERMS = 200_000
# depths used by the ratio-test probe
RADIUS_PROBES = (64, 128, 256, 512, 1024)


@dataclass(frozen=True)
class EnergySpectrum:
    """Dimensionless levels ``eps_n`` with energy scale ``omega``.

    ``offset`` records the ground level removed by :func:`shift_to_zero`,
    in units of ``omega``.  ``size`` is set for finite (explicit) spectra.
    ``limit`` holds ``lim eps_n`` when it is known in closed form.
    """

    rule: Callable[[int], float] = field(compare=False)
    omega: float = 1.0
    descriptor: str = "rule"
    params: dict = field(default_factory=dict, compare=False, hash=False)
    size: int | None = None
    offset: float = 0.0
    limit: float | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @classmethod
    def linear(cls, omega: float = 1.0) -> EnergySpectrum:
        """``eps_n = n``: the harmonic oscillator."""
        return cls(float, omega, "linear", {}, None, 0.0, math.inf)

    @classmethod
    def affine(cls, slope: float, intercept: float = 0.0, omega: float = 1.0) -> EnergySpectrum:
        if not slope > 0:
            raise NonMonotoneSpectrum(f"affine slope must be positive, got {slope}")
        return cls(
            lambda n: slope * n + intercept,
            omega,
            "affine",
            {"slope": slope, "intercept": intercept},
            None,
            0.0,
            math.inf,
        )

    @classmethod
    def from_levels(cls, levels: Sequence[float], omega: float = 1.0) -> EnergySpectrum:
        """Finite spectrum from an explicit list of levels."""
        values = tuple(float(v) for v in levels)
        if not values:
            raise ValueError("empty level list")
        return cls(
            values.__getitem__,
            omega,
            "explicit",
            {"levels": list(values)},
            len(values),
            0.0,
            math.inf,
        )

    @classmethod
    def bounded(cls, L: float, a: float = 0.0, omega: float = 1.0) -> EnergySpectrum:
        """``eps_0 = 0``, ``eps_n = L (n + a) / (n + a + 1)``; accumulates at ``L``.

        These are the ratios of the moments of ``(a+1) J**a / L**(a+1)`` on ``[0, L)``.
        """
        if not (L > 0 and a > -1):
            raise ValueError("need L > 0 and a > -1")
        return cls(
            lambda n: 0.0 if n == 0 else L * (n + a) / (n + a + 1),
            omega,
            "bounded",
            {"L": L, "a": a},
            None,
            0.0,
            float(L),
        )

    @classmethod
    def from_rule(
        cls,
        rule: Callable[[int], float],
        omega: float = 1.0,
        descriptor: str = "rule",
        params: dict | None = None,
        limit: float | None = None,
    ) -> EnergySpectrum:
        return cls(rule, omega, descriptor, dict(params or {}), None, 0.0, limit)

    def eps(self, n: int) -> float:
        if n < 0 or (self.size is not None and n >= self.size):
            raise IndexError(f"level {n} outside spectrum of size {self.size}")
        value = float(self.rule(n))
        if not math.isfinite(value):
            raise ValueError(f"eps_{n} is not finite")
        return value

    def max_index(self, n_max: int) -> int:
        """Largest index <= n_max that exists in this spectrum."""
        if self.size is None:
            return n_max
        return min(n_max, self.size - 1)

    def levels(self, n_max: int) -> np.ndarray:
        """``eps_0 .. eps_{n_max}`` (clipped for finite spectra)."""
        return np.array([self.eps(n) for n in range(self.max_index(n_max) + 1)])

    def energies(self, n_max: int) -> np.ndarray:
        """Physical energies ``omega * (eps_n + offset)``."""
        return self.omega * (self.levels(n_max) + self.offset)

    def check_increasing(self, n_max: int) -> None:
        """O(n_max) strictness check; raises NonMonotoneSpectrum."""
        lev = self.levels(n_max)
        bad = np.nonzero(np.diff(lev) <= 0)[0]
        if bad.size:
            k = int(bad[0]) + 1
            raise NonMonotoneSpectrum(f"eps_{k} = {lev[k]} does not exceed eps_{k - 1} = {lev[k - 1]}")

    def require_shifted(self) -> None:
        if self.eps(0) != 0.0:
            raise UnshiftedSpectrum(f"eps_0 = {self.eps(0)}; call shift_to_zero first")

    def fingerprint(self, depth: int = 32) -> str:
        """Digest of omega, offset and the first levels; detects mismatched evolution."""
        h = hashlib.sha1()
        h.update(np.array([self.omega, self.offset]).tobytes())
        h.update(self.levels(depth).tobytes())
        return h.hexdigest()[:16]

    @cached_property
    def radius(self) -> RadiusEstimate:
        return radius_of_convergence(self)

    def to_dict(self) -> dict:
        """JSON-safe description; rule-based spectra cannot be serialized."""
        if self.descriptor in ("rule",):
            raise ValueError("rule-based spectra have no serial form")
        return {
            "descriptor": self.descriptor,
            "omega": self.omega,
            "offset": self.offset,
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, data: dict) -> EnergySpectrum:
        kind = data["descriptor"]
        omega = data.get("omega", 1.0)
        params = data.get("params", {})
        if kind == "linear":
            spec = cls.linear(omega)
        elif kind == "affine":
            spec = cls.affine(params["slope"], params.get("intercept", 0.0), omega)
        elif kind == "explicit":
            spec = cls.from_levels(params["levels"], omega)
        elif kind == "bounded":
            spec = cls.bounded(params["L"], params.get("a", 0.0), omega)
        else:
            raise ValueError(f"cannot rebuild spectrum with descriptor {kind!r}")
        return replace(spec, offset=data.get("offset", 0.0))


def shift_to_zero(spec: EnergySpectrum) -> EnergySpectrum:
    """Subtract the ground level; the removed amount accumulates in ``offset``."""
    e0 = spec.eps(0)
    if e0 == 0.0:
        return spec
    if spec.descriptor == "explicit":
        shifted = EnergySpectrum.from_levels([v - e0 for v in spec.params["levels"]], spec.omega)
    elif spec.descriptor == "affine":
        shifted = EnergySpectrum.affine(spec.params["slope"], 0.0, spec.omega)
    else:
        rule = spec.rule
        limit = None if spec.limit is None else spec.limit - e0
        shifted = replace(spec, rule=lambda n: rule(n) - e0, limit=limit)
    return replace(shifted, offset=spec.offset + e0)


def eps_factorial(spec: EnergySpectrum, n: int, switch: float = LOG_SWITCH) -> float:
    """``eps_1 * eps_2 * ... * eps_n`` with ``eps_0! = 1``.

    The product is exact (float multiplication) until it exceeds ``switch``,
    after which the remaining factors are accumulated as logarithms.
    """
    spec.require_shifted()
    prev = 0.0
    prod = 1.0
    log_acc = None
    for k in range(1, n + 1):
        e = spec.eps(k)
        if not e > prev:
            raise NonMonotoneSpectrum(f"eps_{k} = {e} does not exceed eps_{k - 1} = {prev}")
        prev = e
        if log_acc is None:
            prod *= e
            if prod > switch:
                log_acc = math.log(prod)
        else:
            log_acc += math.log(e)
    if log_acc is None:
        return prod
    try:
        return math.exp(log_acc)
    except OverflowError:
        raise OverflowError(f"eps_{n}! = exp({log_acc:.6g}) overflows a double") from None


def log_eps_factorial(spec: EnergySpectrum, n: int) -> float:
    spec.require_shifted()
    lev = spec.levels(n)
    if np.any(np.diff(lev) <= 0):
        spec.check_increasing(n)
    return float(np.sum(np.log(lev[1:])))


class RadiusEstimate(NamedTuple):
    value: float
    status: str  # closed-form | finite | stabilized | unbounded | still-growing


def radius_of_convergence(spec: EnergySpectrum, deg: DegeneracySequence | None = None) -> RadiusEstimate:
    """Radius ``L`` of the normalization series, via the ratio test.

    With ``rho_n = eps_n! d(n)`` the consecutive-term ratio of
    ``sum J**n d(n) / rho_n`` is ``J / eps_n``, so degeneracies cancel and ``L``
    is the limit of the levels.  ``deg`` is accepted for interface symmetry.
    """
    if spec.size is not None:
        return RadiusEstimate(math.inf, "finite")
    if spec.limit is not None:
        return RadiusEstimate(float(spec.limit), "closed-form")
    probes = [spec.eps(n) for n in RADIUS_PROBES]
    last, prev = probes[-1], probes[-2]
    if abs(last - prev) <= 1e-9 * max(1.0, abs(last)):
        return RadiusEstimate(last, "stabilized")
    if prev > 0 and last / prev >= 1.2:
        return RadiusEstimate(math.inf, "unbounded")
    return RadiusEstimate(last, "still-growing")


@dataclass(frozen=True)
class SeriesTerms:
    """Log terms ``log(x**n / eps_n!)`` for ``n = 0..depth``.

    ``tail_bound`` bounds the omitted sum ``sum_{n > depth}`` relative to the
    partial sum.  It is the geometric estimate ``t_{K+1} / (1 - x/eps_{K+2})``,
    valid because the ratios ``x / eps_n`` decrease for increasing levels.
    """

    log_terms: np.ndarray
    levels: np.ndarray
    depth: int
    tail_bound: float

    @property
    def terms(self) -> np.ndarray:
        return np.exp(self.log_terms)


def series_terms(
    spec: EnergySpectrum,
    log_x: float,
    tol: float,
    max_terms: int = MAX_TERMS,
) -> SeriesTerms:
    """Adaptive truncation of ``sum x**n / eps_n!`` given ``log x`` (``-inf`` for x = 0)."""
    spec.require_shifted()
    if log_x == -math.inf:
        return SeriesTerms(np.zeros(1), np.zeros(1), 0, 0.0)
    x = math.exp(log_x)
    lim = spec.radius
    if x >= lim.value and lim.status != "still-growing":
        raise OutsideConvergenceDomain(f"x = {x} is not below the radius L = {lim.value}")

    logs = [0.0]
    levels = [0.0]
    log_fact = 0.0
    log_sum = 0.0
    last = spec.max_index(max_terms + 2)
    n = 0
    while True:
        if n >= last:
            return SeriesTerms(np.array(logs), np.array(levels), n, 0.0)
        if n + 1 > max_terms:
            raise NonConvergent(f"tail above {tol:g} after {max_terms} terms at x = {x}")
        e_next = spec.eps(n + 1)
        if not e_next > levels[-1]:
            raise NonMonotoneSpectrum(f"eps_{n + 1} = {e_next} does not exceed eps_{n} = {levels[-1]}")
        log_next = (n + 1) * log_x - (log_fact + math.log(e_next))
        # candidate stop at depth n: bound the tail from t_{n+1} and eps_{n+2}
        if n + 2 > last:
            q = 0.0
        else:
            q = x / spec.eps(n + 2)
        if q < 1.0:
            rel_tail = math.exp(log_next - log_sum) / (1.0 - q)
            if rel_tail <= tol:
                return SeriesTerms(np.array(logs), np.array(levels), n, rel_tail)
        n += 1
        log_fact += math.log(e_next)
        logs.append(log_next)
        levels.append(e_next)
        log_sum = np.logaddexp(log_sum, log_next)


def _log(x: float) -> float:
    if x < 0:
        raise ValueError(f"action variable must be >= 0, got {x}")
    return -math.inf if x == 0 else math.log(x)


class Normalization(NamedTuple):
    value: float
    depth: int
    tail_bound: float  # relative to value


def normalization(
    spec: EnergySpectrum,
    deg: DegeneracySequence | None,
    J: float,
    tol: float = 1e-14,
) -> Normalization:
    """``N(J) = sum J**n d(n) / rho_n`` with ``rho_n = eps_n! d(n)``, i.e. ``sum J**n / eps_n!``.

    The tail bound is relative: the omitted terms sum to at most
    ``tail_bound * value``.
    """
    s = series_terms(spec, _log(J), tol)
    return Normalization(float(np.sum(s.terms)), s.depth, s.tail_bound)


@dataclass(frozen=True)
class DegeneracySequence:
    """Level degeneracies ``d(n) >= 1``."""

    rule: Callable[[int], int] = field(compare=False)
    descriptor: str = "constant-1"
    params: dict = field(default_factory=dict, compare=False, hash=False)

    def __call__(self, n: int) -> int:
        d = int(self.rule(n))
        if d < 1:
            raise ValueError(f"d({n}) = {d} must be a positive integer")
        return d

    def values(self, n_max: int) -> np.ndarray:
        return np.array([self(n) for n in range(n_max + 1)], dtype=np.int64)

    @classmethod
    def constant(cls) -> DegeneracySequence:
        return cls(lambda n: 1, "constant-1")

    @classmethod
    def example1(cls) -> DegeneracySequence:
        """One boson plus one fermion: ground level single, the rest doubled."""
        return cls(lambda n: 1 if n == 0 else 2, "example1")

    @classmethod
    def example2(cls) -> DegeneracySequence:
        """Planar oscillator levels at the frequency ratio two."""
        return cls(lambda n: n // 2 + 1, "example2")

    @classmethod
    def example3(cls) -> DegeneracySequence:
        """Three-dimensional isotropic oscillator shells."""
        return cls(lambda n: (n + 1) * (n + 2) // 2, "example3")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> DegeneracySequence:
        vals = tuple(int(v) for v in values)
        return cls(vals.__getitem__, "explicit", {"values": list(vals)})

    def to_dict(self) -> dict:
        return {"descriptor": self.descriptor, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> DegeneracySequence:
        kind = data["descriptor"]
        builders = {
            "constant-1": cls.constant,
            "example1": cls.example1,
            "example2": cls.example2,
            "example3": cls.example3,
        }
        if kind in builders:
            return builders[kind]()
        if kind == "explicit":
            return cls.from_list(data["params"]["values"])
        raise ValueError(f"unknown degeneracy descriptor {kind!r}")


@dataclass(frozen=True)
class BranchSet:
    """``N`` families of levels, each shifted so that its ground level is zero.

    Branch ``j`` (0-based) has levels ``eps_{jk}``; its removed ground energy
    is kept in ``branches[j].offset``.
    """

    branches: tuple[EnergySpectrum, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.branches:
            raise ValueError("a branch set needs at least one branch")
        for spec in self.branches:
            spec.require_shifted()
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(j) for j in range(len(self.branches))))
        if len(self.labels) != len(self.branches):
            raise ValueError("one label per branch")

    @property
    def N(self) -> int:
        return len(self.branches)

    def __getitem__(self, j: int) -> EnergySpectrum:
        from .errors import BranchOutOfRange

        if not 0 <= j < self.N:
            raise BranchOutOfRange(f"branch {j} not in 0..{self.N - 1}")
        return self.branches[j]

    def diag_levels(self, k: int) -> np.ndarray:
        """Diagonal of the level matrix at index ``k`` across branches."""
        return np.array([b.eps(k) for b in self.branches])

    def diag_factorials(self, k: int) -> np.ndarray:
        return np.array([eps_factorial(b, k) for b in self.branches])

    def one_hot(self, j: int) -> np.ndarray:
        """Diagonal selector used when evolving a single branch."""
        self[j]
        d = np.zeros(self.N)
        d[j] = 1.0
        return d

    def collisions(self, depth: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Pairs ``(j,k), (j',l)`` with ``k != l`` but equal shifted levels.

        Only within-branch ordering is enforced; these are reported, not rejected.
        """
        found = []
        seen: dict[float, list[tuple[int, int]]] = {}
        for j, b in enumerate(self.branches):
            for k, e in enumerate(b.levels(depth)):
                for other in seen.get(e, []):
                    if other[1] != k:
                        found.append((other, (j, k)))
                seen.setdefault(e, []).append((j, k))
        return found
