"""Physical Hamiltonians as spectrum, degeneracy and measure bundles.

Fermion sectors enter only through level offsets and degeneracy counts, so
they are carried as labels rather than operator matrices.

Index convention for the boson plus two fermion model: sector ``(k, l)``
has ``k`` quanta in the first fermion mode and ``l`` in the second, so
``eps_kl = k eps1 + l eps2`` and ``g_kl = k g1 + l g2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .errors import NotHermitian
from .measures import RadialMeasure, closed_form_measure, exact_targets, laguerre_coefficients
from .spectrum import BranchSet, DegeneracySequence, EnergySpectrum

__all__ = [
    "ModelDescriptor",
    "SectorRow",
    "SpectralTable",
    "DegeneracyCheck",
    "two_fermion_spectrum",
    "degeneracy_free_check",
    "hermitian_coupling_diagonalize",
    "planar_frequencies",
    "gk_linear",
    "example1_build",
    "example2_build",
    "example3_build",
    "boson_two_fermion",
    "two_fermion_hermitian",
    "build_model",
    "MODEL_TAGS",
]

SECTORS = ((0, 0), (1, 0), (0, 1), (1, 1))
FERMION_LABELS = {
    (0, 0): "vacuum",
    (1, 0): "c1+ vacuum",
    (0, 1): "c2+ vacuum",
    (1, 1): "c1+ c2+ vacuum",
}


@dataclass(frozen=True)
class ModelDescriptor:
    """A model ready for state construction.

    Scalar models set ``spectrum``; sector-decomposed models set ``branches``
    (one shifted spectrum per sector) and use the same radial measure on each.
    """

    tag: str
    params: dict
    spectrum: EnergySpectrum | None
    degeneracy: DegeneracySequence
    measure: RadialMeasure | None
    branches: BranchSet | None = None
    table: SpectralTable | None = None
    extras: dict = field(default_factory=dict)

    def model_card(self) -> dict:
        """JSON-safe summary: spectrum law, degeneracy law, measure and notes."""
        card = {
            "tag": self.tag,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "degeneracy": self.degeneracy.to_dict(),
            "measure": None if self.measure is None else self.measure.to_dict(),
            "measure_signed": None if self.measure is None else self.measure.nonpositive_somewhere,
            "weak_only": None if self.measure is None else self.measure.weak_only,
        }
        if self.spectrum is not None:
            card["spectrum"] = self.spectrum.to_dict()
        if self.branches is not None:
            card["branches"] = {
                lab: b.to_dict() for lab, b in zip(self.branches.labels, self.branches.branches)
            }
        if self.table is not None:
            card["table"] = self.table.to_dict()
        card["notes"] = {k: _jsonable(v) for k, v in self.extras.items() if not callable(v)}
        return card


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, np.generic):
        return v.item()
    return v


class SectorRow(NamedTuple):
    k: int
    l: int
    ground: object  # E_0^{kl}; exact when the inputs are Fractions
    coupling: object  # g_kl
    fermions: str


@dataclass(frozen=True)
class SpectralTable:
    """Sector ground energies ``E_0^{kl} = eps_kl - g_kl**2 / omega``; ``E_n^{kl} = omega n + E_0^{kl}``."""

    omega: object
    rows: tuple[SectorRow, ...]

    def row(self, k: int, l: int) -> SectorRow:
        for r in self.rows:
            if (r.k, r.l) == (k, l):
                return r
        raise KeyError((k, l))

    def energy(self, k: int, l: int, n: int):
        return self.omega * n + self.row(k, l).ground

    def shift_operator(self, k: int, l: int, dim: int) -> np.ndarray:
        """``a + g_kl / omega`` on a ``dim``-state Fock truncation."""
        a = np.diag(np.sqrt(np.arange(1, dim)), 1)
        return a + float(self.row(k, l).coupling) / float(self.omega) * np.eye(dim)

    def commutator_residual(self, k: int, l: int, dim: int) -> float:
        """``max |[A, A+] - 1|`` on the inner ``(dim-1)`` block; the last row is a truncation artefact."""
        A = self.shift_operator(k, l, dim)
        comm = A @ A.T - A.T @ A
        return float(np.max(np.abs(comm[:-1, :-1] - np.eye(dim - 1))))

    def branch_set(self) -> BranchSet:
        specs = []
        for r in self.rows:
            spec = EnergySpectrum.linear(float(self.omega))
            specs.append(
                EnergySpectrum(
                    spec.rule, spec.omega, "model", {"sector": f"{r.k}{r.l}"}, None,
                    float(r.ground) / float(self.omega), math.inf,
                )
            )
        return BranchSet(tuple(specs), tuple(f"{r.k}{r.l}" for r in self.rows))

    def to_dict(self) -> dict:
        return {
            "omega": _jsonable(self.omega),
            "rows": [
                {"k": r.k, "l": r.l, "E0": _jsonable(r.ground), "g": _jsonable(r.coupling), "fermions": r.fermions}
                for r in self.rows
            ],
        }


def two_fermion_spectrum(omega, eps1, eps2, g1, g2) -> SpectralTable:
    """Sector table of ``omega a+a + eps1 c1+c1 + eps2 c2+c2 + (g1 c1+c1 + g2 c2+c2)(a + a+)``.

    Works with floats or Fractions; Fractions give exact ground energies.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    rows = []
    for k, l in SECTORS:
        e = k * eps1 + l * eps2
        g = k * g1 + l * g2
        rows.append(SectorRow(k, l, e - g * g / omega, g, FERMION_LABELS[(k, l)]))
    return SpectralTable(omega, tuple(rows))


class DegeneracyCheck(NamedTuple):
    ok: bool
    ground_levels: tuple  # (0, E1, E2, E3)
    violated: str | None
    spectrum: EnergySpectrum | None  # merged eps_n = E_n / omega when ok


def degeneracy_free_check(omega, eps1, eps2, g1, g2) -> DegeneracyCheck:
    """Chain ``0 < E1 < E2 < E3 < omega`` that keeps every merged level distinct.

    ``E1 = eps1 - g1**2/omega``, ``E2 = eps2 - g2**2/omega`` and
    ``E3 = eps1 + eps2 - (g1**2 + g2**2)/omega``.  When it holds the merged
    levels are ``E_{4q+r} = q omega + E_r``.
    """
    E = (0 * omega, eps1 - g1 * g1 / omega, eps2 - g2 * g2 / omega, eps1 + eps2 - (g1 * g1 + g2 * g2) / omega)
    chain = [E[0], E[1], E[2], E[3], omega]
    names = ["0", "E1", "E2", "E3", "omega"]
    for i in range(4):
        if not chain[i] < chain[i + 1]:
            return DegeneracyCheck(False, E, f"{names[i]} < {names[i + 1]} fails ({chain[i]} >= {chain[i + 1]})", None)
    offsets = tuple(float(e) / float(omega) for e in E)
    spec = EnergySpectrum.from_rule(
        lambda n: n // 4 + offsets[n % 4],
        float(omega),
        "model",
        {"model": "two-fermion-merged", "offsets": list(offsets)},
        limit=math.inf,
    )
    return DegeneracyCheck(True, E, None, spec)


def hermitian_coupling_diagonalize(g, atol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Unitary ``V`` with ``V g V^-1 = diag(g1, g2)``, ``g1 >= g2``.

    The rotated fermions decouple only when both modes have equal energy; for
    unequal energies the free fermion part stops being diagonal.
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2) or not np.allclose(g, g.conj().T, atol=atol, rtol=0):
        raise NotHermitian("coupling must be a 2x2 hermitian matrix")
    w, U = np.linalg.eigh(g)
    order = np.argsort(w)[::-1]
    w, U = w[order], U[:, order]
    # fix column phases: first nonzero entry real and positive
    for c in range(2):
        i = int(np.argmax(np.abs(U[:, c]) > 1e-14))
        U[:, c] *= np.exp(-1j * np.angle(U[i, c]))
    V = U.conj().T
    return V, np.diag(w)


def planar_frequencies(m: float, k: float, b: float) -> tuple[float, float]:
    """``(omega_plus, omega_minus)`` with ``omega_pm**2 = (k +- b) / m``."""
    if not (m > 0 and k > 0 and abs(b) < k):
        raise ValueError("need m, k > 0 and |b| < k")
    return math.sqrt((k + b) / m), math.sqrt((k - b) / m)


def gk_linear(omega: float = 1.0) -> ModelDescriptor:
    """Harmonic oscillator: canonical coherent states in action-angle form."""
    return ModelDescriptor(
        "gk-linear",
        {"omega": omega},
        EnergySpectrum.linear(omega),
        DegeneracySequence.constant(),
        closed_form_measure("gk-linear"),
    )


def example1_build(omega: float = 1.0) -> ModelDescriptor:
    """``omega (a+a + c+c)``: one boson and one fermion, levels ``omega n`` doubly degenerate for ``n >= 1``."""
    return ModelDescriptor(
        "example1",
        {"omega": omega},
        EnergySpectrum.linear(omega),
        DegeneracySequence.example1(),
        closed_form_measure("example1"),
        extras={"eigenvectors": "phi_{n,j} = Phi_{n-j} (x) Psi_j, j = 0, 1", "normalization": "exp(J)"},
    )


def example2_build(m: float = 1.0, k: float = 1.0, laguerre_n: int = 16) -> ModelDescriptor:
    """Planar oscillator at ``b = 3k/5``, where ``omega_plus = 2 omega_minus``.

    Levels are ``omega_minus n`` with ``d(n) = n//2 + 1``.  No closed-form
    measure is known; the Laguerre partial sum of order ``laguerre_n`` is
    attached and flagged weak-only.
    """
    b = 3 * k / 5
    w_plus, w_minus = planar_frequencies(m, k, b)
    spec = EnergySpectrum.linear(w_minus)
    deg = DegeneracySequence.example2()
    series = laguerre_coefficients(exact_targets(spec, deg, laguerre_n))
    measure = RadialMeasure.laguerre(series, note="signed Laguerre partial sum; weak sense only")
    return ModelDescriptor(
        "example2",
        {"m": m, "k": k, "b": b},
        spec,
        deg,
        measure,
        extras={"omega_plus": w_plus, "omega_minus": w_minus, "frequency_ratio": w_plus / w_minus},
    )


def example3_build(m: float = 1.0, k: float = 1.0, e: float = 0.0, B: float = 0.0, warn_ratio: float = 0.1) -> ModelDescriptor:
    """Charged 3D oscillator in a weak field, collapsed to levels ``omega n``.

    The exact three-frequency energies are kept in ``extras['exact_energy']``.
    A warning is emitted when ``Omega / omega`` exceeds ``warn_ratio``; the
    collapsed spectrum is used regardless.
    """
    if not (m > 0 and k > 0):
        raise ValueError("need m, k > 0")
    omega = math.sqrt(k / m)
    Omega = e * B / (2 * m)
    w_tilde = math.sqrt(Omega**2 + omega**2)
    if abs(Omega) / omega > warn_ratio:
        warnings.warn(
            f"Omega/omega = {abs(Omega) / omega:.3g}; the equal-spacing approximation is poor",
            stacklevel=2,
        )

    def exact_energy(n_plus: int, n_minus: int, n_z: int) -> float:
        return n_plus * (w_tilde + Omega) + n_minus * (w_tilde - Omega) + n_z * omega

    return ModelDescriptor(
        "example3",
        {"m": m, "k": k, "e": e, "B": B},
        EnergySpectrum.linear(omega),
        DegeneracySequence.example3(),
        closed_form_measure("example3"),
        extras={"Omega": Omega, "omega_tilde": w_tilde, "exact_energy": exact_energy},
    )


def boson_two_fermion(omega=1.0, eps1=0.2, eps2=0.45, g1=0.1, g2=0.1) -> ModelDescriptor:
    """Boson mode coupled to two fermion modes; four sectors of equally spaced levels."""
    table = two_fermion_spectrum(omega, eps1, eps2, g1, g2)
    check = degeneracy_free_check(omega, eps1, eps2, g1, g2)
    collisions = table.branch_set().collisions(8)
    return ModelDescriptor(
        "boson-two-fermion",
        {"omega": omega, "eps1": eps1, "eps2": eps2, "g1": g1, "g2": g2},
        None,
        DegeneracySequence.constant(),
        closed_form_measure("boson-two-fermion"),
        branches=table.branch_set(),
        table=table,
        extras={"degeneracy_free": check.ok, "violated": check.violated, "cross_branch_collisions": len(collisions)},
    )


def two_fermion_hermitian(omega=1.0, eps=0.3, g=((0.1, 0.05), (0.05, 0.2))) -> ModelDescriptor:
    """Hermitian coupling matrix with equal fermion energies, reduced to the diagonal model."""
    V, gd = hermitian_coupling_diagonalize(g)
    g1, g2 = float(gd[0, 0].real), float(gd[1, 1].real)
    model = boson_two_fermion(omega, eps, eps, g1, g2)
    return ModelDescriptor(
        "two-fermion-hermitian",
        {"omega": omega, "eps": eps, "g": np.asarray(g, dtype=complex).tolist()},
        None,
        model.degeneracy,
        closed_form_measure("two-fermion-hermitian"),
        branches=model.branches,
        table=model.table,
        extras={"rotation": V, "g_diag": [g1, g2]},
    )


MODEL_TAGS: dict[str, Callable[..., ModelDescriptor]] = {
    "gk-linear": gk_linear,
    "example1": example1_build,
    "boson-fermion": example1_build,
    "example2": example2_build,
    "planar-oscillator": example2_build,
    "example3": example3_build,
    "charged-oscillator-3d": example3_build,
    "boson-two-fermion": boson_two_fermion,
    "two-fermion-hermitian": two_fermion_hermitian,
}


def build_model(tag: str, **params) -> ModelDescriptor:
    try:
        builder = MODEL_TAGS[tag]
    except KeyError:
        raise KeyError(f"unknown model {tag!r}; known: {sorted(MODEL_TAGS)}") from None
    return builder(**params)
