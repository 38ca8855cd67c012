"""Coherent-state families as truncated coefficient vectors.

Every ket carries its truncation depth and a relative tail bound: the mass
beyond the truncation is at most ``tail_bound`` times the retained mass.

Families and their label schemes:

=============  ========  ==============================================
family         scheme    levels used by :func:`evolve`
=============  ========  ==============================================
``gk``         ``n``     ``eps_n``
``degenerate`` ``n,j``   ``eps_n`` (``j = 1..d(n)``)
``branch``     ``j;k``   ``eps_{jk}`` plus the branch ground energy
``vcs1``       ``n,l``   ``eps_n``  (first Hamiltonian)
``vcs2``       ``n,l``   ``eps_l``  (second Hamiltonian)
``bcs``        ``n,l``   ``eps_n - eps_l``
=============  ========  ==============================================

Complex labels use ``z = sqrt(J) exp(-i gamma)`` so that ``J**(n/2) exp(-i n gamma) = z**n``
for the linear spectrum.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import SpectrumMismatch
from .spectrum import BranchSet, DegeneracySequence, EnergySpectrum, SeriesTerms, series_terms

__all__ = [
    "LabeledKet",
    "VCSBundle",
    "EnergyEstimate",
    "gk_state",
    "degenerate_state",
    "branch_vcs",
    "vcs1",
    "vcs1_family",
    "vcs2",
    "bcs",
    "vcs1_z",
    "vcs2_z",
    "bcs_z",
    "action_angle",
    "complex_label",
    "evolve",
    "energy_expectation",
]

DEFAULT_TOL = 1e-14
_EPS = np.finfo(float).eps

SCHEMES = {
    "gk": ("n",),
    "degenerate": ("n", "j"),
    "branch": ("j", "k"),
    "vcs1": ("n", "l"),
    "vcs2": ("n", "l"),
    "bcs": ("n", "l"),
    "kms": ("m", "l"),
}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledKet:
    """Truncated ket: ``coeffs[i]`` is the amplitude of basis label ``labels[i]``."""

    family: str
    labels: np.ndarray  # int, shape (M, width)
    coeffs: np.ndarray  # complex, shape (M,)
    truncation: int
    tail_bound: float
    params: dict = field(default_factory=dict)
    fingerprint: str = ""

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim == 1:
            labels = labels[:, None]
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if labels.shape[0] != coeffs.shape[0]:
            raise ValueError("one coefficient per label")
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    @property
    def scheme(self) -> tuple[str, ...]:
        return SCHEMES[self.family]

    def norm2(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def inner(self, other: LabeledKet) -> complex:
        """``<self|other>`` over shared labels."""
        index = {tuple(l): i for i, l in enumerate(other.labels.tolist())}
        total = 0j
        for l, c in zip(self.labels.tolist(), self.coeffs):
            i = index.get(tuple(l))
            if i is not None:
                total += np.conj(c) * other.coeffs[i]
        return complex(total)

    def amplitude(self, *label: int) -> complex:
        hit = np.nonzero(np.all(self.labels == np.array(label), axis=1))[0]
        return complex(self.coeffs[hit[0]]) if hit.size else 0j

    def replace_coeffs(self, coeffs: np.ndarray, **params) -> LabeledKet:
        return LabeledKet(
            self.family,
            self.labels,
            coeffs,
            self.truncation,
            self.tail_bound,
            {**self.params, **params},
            self.fingerprint,
        )

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "scheme": list(self.scheme),
            "labels": self.labels.tolist(),
            "re": self.coeffs.real.tolist(),
            "im": self.coeffs.imag.tolist(),
            "truncation": self.truncation,
            "tail_bound": self.tail_bound,
            "params": self.params,
            "fingerprint": self.fingerprint,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> LabeledKet:
        coeffs = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
        return cls(
            data["family"],
            np.array(data["labels"], dtype=np.int64),
            coeffs,
            int(data["truncation"]),
            float(data["tail_bound"]),
            dict(data.get("params", {})),
            data.get("fingerprint", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> LabeledKet:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Rows of label indices, re, im, modulus squared."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([*self.scheme, "re", "im", "modulus2"])
        for lab, c in zip(self.labels.tolist(), self.coeffs):
            writer.writerow([*lab, repr(float(c.real)), repr(float(c.imag)), repr(float(abs(c) ** 2))])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class VCSBundle:
    """Vector coherent state living on branch ``branch`` of a BranchSet."""

    branch: int
    ket: LabeledKet
    J: np.ndarray
    gamma: np.ndarray

    def inner(self, other: VCSBundle) -> complex:
        return self.ket.inner(other.ket)


class EnergyEstimate(NamedTuple):
    value: float
    error_bound: float


def _series(spec: EnergySpectrum, J: float, tol: float) -> SeriesTerms:
    if J < 0:
        raise ValueError(f"J must be >= 0, got {J}")
    return series_terms(spec, -math.inf if J == 0 else math.log(J), tol)


def _amplitudes(s: SeriesTerms) -> tuple[np.ndarray, float]:
    """Normalized moduli ``sqrt(t_n / N)`` and the partial sum ``N``."""
    total = float(np.sum(s.terms))
    return np.exp(0.5 * (s.log_terms - math.log(total))), total


def action_angle(z: complex) -> tuple[float, float]:
    """``(J, gamma)`` with ``z = sqrt(J) exp(-i gamma)``."""
    return abs(z) ** 2, -math.atan2(z.imag, z.real) if z != 0 else 0.0


def complex_label(J: float, gamma: float) -> complex:
    return math.sqrt(J) * complex(math.cos(gamma), -math.sin(gamma))


def gk_state(
    spec: EnergySpectrum,
    J: float,
    gamma: float,
    tol: float = DEFAULT_TOL,
    normalized: bool = True,
) -> LabeledKet:
    """``sum_n sqrt(J**n / (eps_n! N(J))) exp(-i eps_n gamma) |n>``.

    With ``normalized=False`` the factor ``N(J)**-1/2`` is dropped (the
    vectors used to build reproducing kernels) and ``tail_bound`` is absolute.
    """
    s = _series(spec, J, tol)
    mod, total = _amplitudes(s)
    tail = s.tail_bound
    if not normalized:
        mod = mod * math.sqrt(total)
        tail *= total
    coeffs = mod * np.exp(-1j * s.levels * gamma)
    return LabeledKet(
        "gk",
        np.arange(s.depth + 1),
        coeffs,
        s.depth,
        tail,
        {"J": J, "gamma": gamma, "normalized": normalized},
        spec.fingerprint(),
    )


def degenerate_state(
    spec: EnergySpectrum,
    deg: DegeneracySequence,
    J: float,
    gamma: float,
    theta: float,
    tol: float = DEFAULT_TOL,
) -> LabeledKet:
    """Coefficients ``J**(n/2) exp(-i eps_n gamma) exp(-i j theta) / sqrt(eps_n! d(n) N(J))``, ``j = 1..d(n)``."""
    s = _series(spec, J, tol)
    mod, _ = _amplitudes(s)
    d = deg.values(s.depth)
    n_idx = np.repeat(np.arange(s.depth + 1), d)
    j_idx = np.concatenate([np.arange(1, dn + 1) for dn in d])
    per_level = mod / np.sqrt(d) * np.exp(-1j * s.levels * gamma)
    coeffs = per_level[n_idx] * np.exp(-1j * j_idx * theta)
    return LabeledKet(
        "degenerate",
        np.column_stack([n_idx, j_idx]),
        coeffs,
        s.depth,
        s.tail_bound,
        {"J": J, "gamma": gamma, "theta": theta, "degeneracy": deg.descriptor},
        spec.fingerprint(),
    )


def branch_vcs(
    branches: BranchSet,
    j: int,
    J: float | Sequence[float],
    gamma: float | Sequence[float],
    tol: float = DEFAULT_TOL,
) -> VCSBundle:
    """State on branch ``j`` built from the diagonal bundles ``J``, ``gamma``.

    Scalars are broadcast to every branch.  Only entry ``j`` of each bundle is
    used: the one-hot selector picks a single branch.
    """
    spec = branches[j]
    Jv = np.broadcast_to(np.asarray(J, dtype=float), (branches.N,)).copy()
    gv = np.broadcast_to(np.asarray(gamma, dtype=float), (branches.N,)).copy()
    s = _series(spec, Jv[j], tol)
    mod, _ = _amplitudes(s)
    coeffs = mod * np.exp(-1j * s.levels * gv[j])
    k = np.arange(s.depth + 1)
    ket = LabeledKet(
        "branch",
        np.column_stack([np.full_like(k, j), k]),
        coeffs,
        s.depth,
        s.tail_bound,
        {"branch": j, "J": Jv.tolist(), "gamma": gv.tolist()},
        spec.fingerprint(),
    )
    return VCSBundle(j, ket, _frozen(Jv), _frozen(gv))


def _psi(s: SeriesTerms, gamma: float, sign: int) -> np.ndarray:
    """Normalized ``Psi_n / sqrt(N)`` with phase ``exp(sign * i eps_n gamma)``."""
    mod, _ = _amplitudes(s)
    return mod * np.exp(sign * 1j * s.levels * gamma)


def vcs1(
    spec: EnergySpectrum,
    J: float,
    gamma: float,
    J2: float,
    gamma2: float,
    ell: int,
    tol: float = DEFAULT_TOL,
) -> LabeledKet:
    """Component ``ell`` of the first vector family (not normalized on its own).

    Coefficient of ``(n, ell)`` is ``Psi_ell(J2, gamma2) conj(Psi_n(J, gamma)) / sqrt(N(J) N(J2))``;
    the squared norms of all components sum to one.
    """
    s1, s2 = _series(spec, J, tol), _series(spec, J2, tol)
    weight = _psi(s2, gamma2, +1)[ell] if ell <= s2.depth else _outside(spec, s2, J2, gamma2, ell)
    coeffs = weight * _psi(s1, gamma, -1)
    n = np.arange(s1.depth + 1)
    return LabeledKet(
        "vcs1",
        np.column_stack([n, np.full_like(n, ell)]),
        coeffs,
        s1.depth,
        s1.tail_bound,
        {"J": J, "gamma": gamma, "J2": J2, "gamma2": gamma2, "ell": ell, "tail2": s2.tail_bound},
        spec.fingerprint(),
    )


def _outside(spec: EnergySpectrum, s: SeriesTerms, J: float, gamma: float, k: int) -> complex:
    """``Psi_k / sqrt(N)`` for an index beyond the adaptive depth."""
    if J == 0:
        return 0j
    log_fact = float(np.sum(np.log(spec.levels(k)[1:])))
    log_mod = 0.5 * (k * math.log(J) - log_fact - math.log(float(np.sum(s.terms))))
    return math.exp(log_mod) * np.exp(1j * spec.eps(k) * gamma)


def vcs1_family(
    spec: EnergySpectrum,
    J: float,
    gamma: float,
    J2: float,
    gamma2: float,
    tol: float = DEFAULT_TOL,
) -> list[LabeledKet]:
    """All components ``ell = 0..K2`` of the first vector family."""
    depth = _series(spec, J2, tol).depth
    return [vcs1(spec, J, gamma, J2, gamma2, ell, tol) for ell in range(depth + 1)]


def vcs2(
    spec: EnergySpectrum,
    J: float,
    gamma: float,
    J2: float,
    gamma2: float,
    n: int,
    tol: float = DEFAULT_TOL,
) -> LabeledKet:
    """Component ``n`` of the second vector family: ``conj(Psi_n(J, gamma)) Psi_l(J2, gamma2)`` over ``l``."""
    s1, s2 = _series(spec, J, tol), _series(spec, J2, tol)
    weight = _psi(s1, gamma, -1)[n] if n <= s1.depth else np.conj(_outside(spec, s1, J, gamma, n))
    coeffs = weight * _psi(s2, gamma2, +1)
    ell = np.arange(s2.depth + 1)
    return LabeledKet(
        "vcs2",
        np.column_stack([np.full_like(ell, n), ell]),
        coeffs,
        s2.depth,
        s2.tail_bound,
        {"J": J, "gamma": gamma, "J2": J2, "gamma2": gamma2, "n": n, "tail1": s1.tail_bound},
        spec.fingerprint(),
    )


def bcs(
    spec: EnergySpectrum,
    J: float,
    gamma: float,
    J2: float,
    gamma2: float,
    tol: float = DEFAULT_TOL,
) -> LabeledKet:
    """Bi-coherent state ``sum_{n,l} conj(Psi_n(J,gamma)) Psi_l(J2,gamma2) |n,l> / sqrt(N(J) N(J2))``."""
    s1, s2 = _series(spec, J, tol), _series(spec, J2, tol)
    block = np.outer(_psi(s1, gamma, -1), _psi(s2, gamma2, +1))
    n, ell = np.meshgrid(np.arange(s1.depth + 1), np.arange(s2.depth + 1), indexing="ij")
    return LabeledKet(
        "bcs",
        np.column_stack([n.ravel(), ell.ravel()]),
        block.ravel(),
        max(s1.depth, s2.depth),
        s1.tail_bound + s2.tail_bound,
        {"J": J, "gamma": gamma, "J2": J2, "gamma2": gamma2, "tail1": s1.tail_bound, "tail2": s2.tail_bound},
        spec.fingerprint(),
    )


def vcs1_z(z: complex, z2: complex, ell: int, tol: float = DEFAULT_TOL, omega: float = 1.0) -> LabeledKet:
    """Linear-spectrum first family in complex labels; amplitude ``exp(-(|z|^2+|z2|^2)/2) conj(z2)**l z**n / sqrt(n! l!)``."""
    return vcs1(EnergySpectrum.linear(omega), *action_angle(z), *action_angle(z2), ell, tol)


def vcs2_z(z: complex, z2: complex, n: int, tol: float = DEFAULT_TOL, omega: float = 1.0) -> LabeledKet:
    return vcs2(EnergySpectrum.linear(omega), *action_angle(z), *action_angle(z2), n, tol)


def bcs_z(z: complex, z2: complex, tol: float = DEFAULT_TOL, omega: float = 1.0) -> LabeledKet:
    return bcs(EnergySpectrum.linear(omega), *action_angle(z), *action_angle(z2), tol)


def _label_energies(ket: LabeledKet, spec) -> tuple[np.ndarray, float]:
    """Dimensionless level of every label and the ground offset that goes with it."""
    if ket.family == "branch":
        b = spec[int(ket.labels[0, 0])]
        return b.levels(ket.truncation)[ket.labels[:, 1]], b.offset
    depth = int(ket.labels.max())
    lev = spec.levels(depth)
    first, last = ket.labels[:, 0], ket.labels[:, -1]
    if ket.family in ("gk", "degenerate", "vcs1"):
        return lev[first], spec.offset
    if ket.family == "vcs2":
        return lev[last], spec.offset
    if ket.family == "bcs":
        return lev[first] - lev[last], 0.0
    raise ValueError(f"no evolution rule for family {ket.family!r}")


def _check_origin(ket: LabeledKet, spec) -> None:
    if ket.family == "branch":
        if not isinstance(spec, BranchSet):
            raise SpectrumMismatch("branch kets evolve with their BranchSet")
        expected = spec[int(ket.labels[0, 0])].fingerprint()
    else:
        if not isinstance(spec, EnergySpectrum):
            raise SpectrumMismatch("expected an EnergySpectrum")
        expected = spec.fingerprint()
    if ket.fingerprint and expected != ket.fingerprint:
        raise SpectrumMismatch("ket was not built from this spectrum")


def evolve(ket: LabeledKet, spec: EnergySpectrum | BranchSet, t: float) -> LabeledKet:
    """Apply ``exp(-i H t)``: each label picks up ``exp(-i omega (eps + offset) t)``.

    ``offset`` is the ground energy removed by ``shift_to_zero`` (per branch for
    branch kets); it contributes the global phase of the unshifted Hamiltonian.
    """
    _check_origin(ket, spec)
    levels, offset = _label_energies(ket, spec)
    omega = spec[0].omega if isinstance(spec, BranchSet) else spec.omega
    phase = np.exp(-1j * omega * t * (levels + offset)) if offset else np.exp(-1j * omega * t * levels)
    return ket.replace_coeffs(ket.coeffs * phase, t=ket.params.get("t", 0.0) + t)


def _top_mass(ket: LabeledKet, col: int, depth: int) -> float:
    sel = ket.labels[:, col] == depth
    return float(np.sum(np.abs(ket.coeffs[sel]) ** 2))


def energy_expectation(ket: LabeledKet | Sequence[LabeledKet], spec: EnergySpectrum | BranchSet) -> EnergyEstimate:
    """``<H>`` for a ket, or summed over the components of a first vector family.

    A single ket is divided by its squared norm.  A sequence of ``vcs1``
    components is summed without division (their norms add to one).

    The error bound covers truncation and floating summation.  Truncating
    ``sum eps_n t_n`` at depth ``K`` drops exactly ``J`` times the top-level
    mass, and the tail beyond ``K`` adds at most ``J`` times the tail bound.
    """
    if isinstance(ket, LabeledKet):
        kets, divide = [ket], True
    else:
        kets, divide = list(ket), False
    if not kets:
        raise ValueError("no kets")
    omega = spec[0].omega if isinstance(spec, BranchSet) else spec.omega
    total = 0.0
    mass = 0.0
    bound = 0.0
    terms = 0
    for k in kets:
        levels, offset = _label_energies(k, spec)
        w = np.abs(k.coeffs) ** 2
        kmass = float(np.sum(w))
        total += omega * float(np.sum((levels + offset) * w))
        mass += kmass
        terms += w.size
        # top-level masses are relative to this ket when dividing by its norm
        scale = 1.0 / kmass if divide else 1.0
        p = k.params
        if k.family == "bcs":
            top1 = scale * _top_mass(k, 0, int(k.labels[:, 0].max()))
            top2 = scale * _top_mass(k, 1, int(k.labels[:, 1].max()))
            bound += omega * (p["J"] * (top1 + p["tail1"]) + p["J2"] * (top2 + p["tail2"]))
        else:
            if k.family == "branch":
                J, col = p["J"][p["branch"]], 1
            elif k.family == "vcs2":
                J, col = p["J2"], 1
            else:
                J, col = p["J"], 0
            top = scale * _top_mass(k, col, int(k.labels[:, col].max()))
            bound += omega * (J * (top + k.tail_bound) + abs(offset) * k.tail_bound)
    if not divide:
        p = kets[0].params
        # components beyond the J2 truncation
        bound += omega * p["J"] * p.get("tail2", 0.0)
    value = total / mass if divide else total
    bound += 4 * terms * _EPS * (abs(value) + omega * abs(offset))
    return EnergyEstimate(value, bound)
