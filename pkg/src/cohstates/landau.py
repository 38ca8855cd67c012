"""Truncated double-Fock model of a planar charge in a uniform magnetic field.

Basis vectors ``Psi[n, l]`` with ``n, l <= K`` are stored as ``(K+1, K+1)``
coefficient arrays ``C[n, l]``.  An operator acting on the first index is a
matrix ``L`` applied as ``L @ C``; on the second index ``C @ R.T``.  The dense
matrix of such a product is ``kron(L, R)`` on the row-major flattening.

Single-mode displacement ``D(z) = exp(z a^+ - conj(z) a)`` enters through its
closed-form matrix elements (associated Laguerre polynomials).  These are the
exact elements of the infinite matrix, so truncating them only drops rows.
The phase-space label is ``z = (y - i x) / sqrt(2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.special import eval_genlaguerre, gammaln
from scipy.stats import poisson

from .errors import GridTooCoarse, TruncationUnsafe
from .states import LabeledKet

__all__ = [
    "LEAK_TOL",
    "DoubleFockOperator",
    "OperatorSet",
    "ThermalVector",
    "ModularTriple",
    "KMSResult",
    "BlockResolution",
    "label_to_z",
    "z_to_label",
    "displacement_elements",
    "displacement_matrix",
    "leakage_estimate",
    "build_operators",
    "displacement",
    "thermal_vector",
    "modular_triple",
    "modular_involution_check",
    "involution_leakage",
    "kms_check",
    "kms_two_point",
    "kms_cs",
    "kms_cs_energy",
    "overlap_law",
    "wigner_eval",
    "intertwining_check",
    "kms_cs_resolution",
    "vcs1_resolution",
    "commutant_check",
]

LEAK_TOL = 1e-10


def label_to_z(x: float, y: float) -> complex:
    return complex(y, -x) / math.sqrt(2.0)


def z_to_label(z: complex) -> tuple[float, float]:
    return -math.sqrt(2.0) * z.imag, math.sqrt(2.0) * z.real


# ---------------------------------------------------------------- single mode


def displacement_elements(m, n, alpha):
    """``<m| D(alpha) |n>`` for integer arrays ``m, n`` and complex ``alpha`` (broadcast)."""
    m = np.asarray(m)
    n = np.asarray(n)
    alpha = np.asarray(alpha, dtype=complex)
    lo = np.minimum(m, n)
    d = np.abs(m - n)
    r2 = np.abs(alpha) ** 2
    # above the diagonal use (-conj(alpha))**(n-m)
    base = np.where(m >= n, alpha, -np.conj(alpha))
    log_pref = 0.5 * (gammaln(lo + 1) - gammaln(lo + d + 1)) - 0.5 * r2
    with np.errstate(divide="ignore", invalid="ignore"):
        powr = np.where(d == 0, 1.0 + 0j, base ** d)
    return np.exp(log_pref) * powr * eval_genlaguerre(lo, d, r2)


def displacement_matrix(z: complex, K: int) -> np.ndarray:
    """``(K+1) x (K+1)`` block of the infinite displacement matrix."""
    idx = np.arange(K + 1)
    return displacement_elements(idx[:, None], idx[None, :], z)


def leakage_estimate(z: complex, K: int) -> float:
    """Mass of the displaced vacuum beyond level ``K``: Poisson tail of ``|z|^2``."""
    return float(poisson.sf(K, abs(z) ** 2))


def _guard(z: complex, K: int, tol: float) -> float:
    leak = leakage_estimate(z, K)
    if leak > tol:
        raise TruncationUnsafe(f"|z| = {abs(z):.3g} leaks {leak:.2e} beyond K = {K} (tolerance {tol:.1e})")
    if abs(z) ** 2 > K / 4:
        warnings.warn(f"|z|^2 = {abs(z) ** 2:.3g} exceeds K/4 = {K / 4}; edge columns are inaccurate", stacklevel=3)
    return leak


# ---------------------------------------------------------------- operators


@dataclass(frozen=True, eq=False)
class DoubleFockOperator:
    """Sum of products ``L (x) R`` acting on ``C[n, l]`` as ``sum L @ C @ R.T``."""

    name: str
    K: int
    terms: tuple[tuple[np.ndarray, np.ndarray], ...]

    @cached_property
    def matrix(self) -> np.ndarray:
        return sum(np.kron(L, R) for L, R in self.terms)

    @property
    def left(self) -> np.ndarray:
        """Mode-1 factor of a single-term operator."""
        (L, R), = self.terms
        return L

    @property
    def right(self) -> np.ndarray:
        (L, R), = self.terms
        return R

    def apply(self, C: np.ndarray) -> np.ndarray:
        C = np.asarray(C).reshape(self.K + 1, self.K + 1)
        return sum(L @ C @ R.T for L, R in self.terms)

    def adjoint(self, name: str | None = None) -> DoubleFockOperator:
        return DoubleFockOperator(name or self.name + "^+", self.K, tuple((L.conj().T, R.conj().T) for L, R in self.terms))

    def __add__(self, other: DoubleFockOperator) -> DoubleFockOperator:
        return DoubleFockOperator(f"({self.name} + {other.name})", self.K, self.terms + other.terms)

    def __sub__(self, other: DoubleFockOperator) -> DoubleFockOperator:
        return self + other.scaled(-1, other.name)

    def scaled(self, c: complex, name: str | None = None) -> DoubleFockOperator:
        return DoubleFockOperator(name or f"{c}*{self.name}", self.K, tuple((c * L, R) for L, R in self.terms))

    def __matmul__(self, other: DoubleFockOperator) -> DoubleFockOperator:
        terms = tuple((L1 @ L2, R1 @ R2) for L1, R1 in self.terms for L2, R2 in other.terms)
        return DoubleFockOperator(f"{self.name} {other.name}", self.K, terms)

    def to_dict(self) -> dict:
        """Row-major dense dump with real and imaginary parts interleaved."""
        M = self.matrix
        flat = np.empty(2 * M.size)
        flat[0::2] = M.real.ravel()
        flat[1::2] = M.imag.ravel()
        return {"name": self.name, "K": self.K, "shape": list(M.shape), "data": flat.tolist()}


def _lower(K: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, K + 1, dtype=float)), 1).astype(complex)


@dataclass(frozen=True)
class OperatorSet:
    K: int
    omega: float
    ops: dict[str, DoubleFockOperator]

    def __getitem__(self, key: str) -> DoubleFockOperator:
        return self.ops[key]

    def inner_block(self, M: np.ndarray) -> np.ndarray:
        """Restrict a dense matrix to labels with both indices ``<= K-1``."""
        K = self.K
        keep = np.array([n < K and l < K for n in range(K + 1) for l in range(K + 1)])
        return M[np.ix_(keep, keep)]


def build_operators(K: int, omega: float = 1.0) -> OperatorSet:
    """Ladder pairs, quadratures and oscillator Hamiltonians on the truncation."""
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    a = _lower(K)
    eye = np.eye(K + 1, dtype=complex)
    num = np.diag(np.arange(K + 1, dtype=float)).astype(complex)
    s2 = math.sqrt(2.0)
    ops = {
        "A1": DoubleFockOperator("A1", K, ((a, eye),)),
        "A1+": DoubleFockOperator("A1+", K, ((a.T.copy(), eye),)),
        "A2": DoubleFockOperator("A2", K, ((eye, a),)),
        "A2+": DoubleFockOperator("A2+", K, ((eye, a.T.copy()),)),
        "Q1": DoubleFockOperator("Q1", K, (((a + a.T) / s2, eye),)),
        "P1": DoubleFockOperator("P1", K, (((a - a.T) / (1j * s2), eye),)),
        "Q2": DoubleFockOperator("Q2", K, ((eye, (a + a.T) / s2),)),
        "P2": DoubleFockOperator("P2", K, ((eye, (a - a.T) / (1j * s2)),)),
        "H1": DoubleFockOperator("H1", K, ((omega * (num + 0.5 * eye), eye),)),
        "H2": DoubleFockOperator("H2", K, ((eye, omega * (num + 0.5 * eye)),)),
        "I": DoubleFockOperator("I", K, ((eye, eye),)),
    }
    ops["H"] = DoubleFockOperator("H", K, ((omega * num, eye), (eye, -omega * num)))
    return OperatorSet(K, omega, ops)


def displacement(z: complex, which: int, K: int, tol: float = LEAK_TOL) -> DoubleFockOperator:
    """``U1(z)`` on the first index or ``U2(z)`` on the second.

    The second mode carries the conjugate label, so ``U2(z) Psi[n, 0]`` has
    amplitudes ``exp(-|z|^2/2) conj(z)**l / sqrt(l!)``.
    """
    _guard(z, K, tol)
    eye = np.eye(K + 1, dtype=complex)
    if which == 1:
        return DoubleFockOperator(f"U1({z})", K, ((displacement_matrix(z, K), eye),))
    if which == 2:
        return DoubleFockOperator(f"U2({z})", K, ((eye, displacement_matrix(np.conj(z), K)),))
    raise ValueError(f"which must be 1 or 2, got {which}")


# ---------------------------------------------------------------- thermal data


@dataclass(frozen=True)
class ThermalVector:
    beta: float
    omega: float
    K: int
    weights: np.ndarray  # lambda_n, n = 0..K
    tail_bound: float  # exp(-(K+1) omega beta), the dropped weight

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def coefficients(self) -> np.ndarray:
        return np.diag(self.sqrt_weights).astype(complex)

    def norm2(self) -> float:
        return float(np.sum(self.weights))


def thermal_vector(beta: float, omega: float, K: int) -> ThermalVector:
    """Purified Gibbs state: ``sqrt(lambda_n)`` on ``Psi[n, n]``."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    x = omega * beta
    n = np.arange(K + 1)
    lam = -math.expm1(-x) * np.exp(-n * x)
    return ThermalVector(beta, omega, K, lam, math.exp(-(K + 1) * x))


@dataclass(frozen=True)
class ModularTriple:
    """Conjugation ``J``, modular operator ``Delta`` and ``S = J Delta^(1/2)`` on the truncation.

    ``Delta`` is diagonal, stored as its entry array ``delta[n, l]``.
    """

    beta: float
    omega: float
    K: int
    delta: np.ndarray

    @staticmethod
    def J(C: np.ndarray) -> np.ndarray:
        """Antiunitary label swap: conjugate, then transpose."""
        return np.conj(C).T

    def Delta(self, C: np.ndarray, power: float = 1.0) -> np.ndarray:
        return self.delta ** power * C

    def S(self, C: np.ndarray) -> np.ndarray:
        return self.J(self.Delta(C, 0.5))

    def delta_matrix(self) -> np.ndarray:
        return np.diag(self.delta.ravel())

    def s_matrix_check(self) -> float:
        """Max deviation of ``S`` from ``J Delta^(1/2)`` built as an explicit antilinear matrix."""
        n = self.K + 1
        # S C = M conj(vec C) with M = swap @ diag(sqrt(delta))
        swap = np.zeros((n * n, n * n))
        for i in range(n):
            for j in range(n):
                swap[j * n + i, i * n + j] = 1.0
        M = swap @ np.diag(np.sqrt(self.delta.ravel()))
        worst = 0.0
        for k in range(n * n):
            e = np.zeros(n * n, dtype=complex)
            e[k] = 1.0
            worst = max(worst, float(np.max(np.abs(self.S(e.reshape(n, n)).ravel() - M @ np.conj(e)))))
        return worst


def modular_triple(beta: float, omega: float, K: int) -> ModularTriple:
    """Entries ``lambda_n / lambda_l = exp(-beta omega (n - l))``."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    n = np.arange(K + 1)
    delta = np.exp(-beta * omega * (n[:, None] - n[None, :]))
    return ModularTriple(beta, omega, K, delta)


def _kms_vector(z: complex, th: ThermalVector) -> np.ndarray:
    return displacement_matrix(z, th.K) * th.sqrt_weights[None, :]


def modular_involution_check(
    beta: float,
    zs: Iterable[complex],
    K: int,
    omega: float = 1.0,
    tol: float = LEAK_TOL,
) -> float:
    """Max over samples of ``||S U1(z) Phi - U1(-z) Phi||``.

    Both sides use the exact matrix elements, so the residual is rounding
    level on any truncation; :func:`involution_leakage` tracks the cutoff.
    """
    th = thermal_vector(beta, omega, K)
    mt = modular_triple(beta, omega, K)
    worst = 0.0
    for z in zs:
        _guard(z, K, tol)
        lhs = mt.S(_kms_vector(z, th))
        rhs = _kms_vector(-z, th)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def involution_leakage(beta: float, z: complex, K: int, omega: float = 1.0) -> float:
    """``||(1 - P_K) U1(z) Phi||^2`` for the untruncated vector, from the exact column masses.

    Only rows beyond ``K`` are missing; columns beyond ``K`` carry thermal weight
    ``exp(-(K+1) omega beta)`` in total.
    """
    th = thermal_vector(beta, omega, K)
    col = np.sum(np.abs(displacement_matrix(z, K)) ** 2, axis=0)
    return float(np.sum(th.weights * np.clip(1.0 - col, 0.0, None)) + th.tail_bound)


# ---------------------------------------------------------------- KMS


@dataclass(frozen=True)
class KMSResult:
    F: complex  # F(t + i beta) on the truncation
    swapped: complex  # <phi; alpha_t(B) A>, closed form
    residual: float
    invariance: float
    K: int
    leakage: float

    def to_dict(self) -> dict:
        return {
            "F_continued": [self.F.real, self.F.imag],
            "swapped": [self.swapped.real, self.swapped.imag],
            "residual": self.residual,
            "invariance": self.invariance,
            "K": self.K,
            "leakage": self.leakage,
        }


def kms_two_point(z_a: complex, z_b: complex, beta: float, t: complex, omega: float = 1.0, swapped: bool = False) -> complex:
    """Closed-form thermal two-point function of displacements.

    ``<D(z_a) D(w)>`` (or ``<D(w) D(z_a)>`` when swapped) with ``w = z_b exp(i omega t)``
    in the Gibbs state; uses ``Tr rho D(g) = exp(-|g|^2 (nbar + 1/2))``.
    """
    w = z_b * np.exp(1j * omega * t)
    nbar = 1.0 / math.expm1(omega * beta)
    a, b = (w, z_a) if swapped else (z_a, w)
    # D(a) D(b) = exp((a conj(b) - conj(a) b) / 2) D(a + b)
    return complex(np.exp(0.5 * (a * np.conj(b) - np.conj(a) * b)) * np.exp(-abs(a + b) ** 2 * (nbar + 0.5)))


def kms_check(
    z_a: complex,
    z_b: complex,
    beta: float,
    t: float,
    K: int,
    omega: float = 1.0,
    tol: float = LEAK_TOL,
    inv_times: Sequence[float] = (0.0, 1.0, 5.0),
) -> KMSResult:
    """Continue ``F(t) = <phi; A alpha_t(B)>`` to ``t + i beta`` termwise and compare.

    On the truncation ``F(t) = sum_{n,m} lambda_n A[n,m] exp(i omega t (m-n)) B[m,n]``,
    a finite exponential sum, so the continuation is exact.  The reference is the
    untruncated swapped correlation from :func:`kms_two_point`.  The Gibbs weights
    are renormalized on the truncation so that ``F = 1`` for trivial ``A, B``.
    """
    leak = max(_guard(z_a, K, tol), _guard(z_b, K, tol))
    th = thermal_vector(beta, omega, K)
    lam = th.weights / np.sum(th.weights)
    A = displacement_matrix(z_a, K)
    B = displacement_matrix(z_b, K)
    n = np.arange(K + 1)
    gap = n[None, :] - n[:, None]  # m - n at [n, m]
    tc = t + 1j * beta
    F = complex(np.sum(lam[:, None] * A * np.exp(1j * omega * tc * gap) * B.T))
    ref = kms_two_point(z_a, z_b, beta, t, omega, swapped=True)
    diag = np.diag(A)
    base = complex(np.sum(lam * diag))
    inv = 0.0
    for s in inv_times:
        # alpha_s(A) has diagonal A[n,n] exp(0)
        evolved = np.diag(np.exp(1j * omega * s * gap) * A)
        inv = max(inv, abs(complex(np.sum(lam * evolved)) - base))
    return KMSResult(F, ref, abs(F - ref), inv, K, leak)


# ---------------------------------------------------------------- KMS coherent states


def kms_cs(
    z: complex,
    beta: float,
    K: int,
    route: str = "displace",
    omega: float = 1.0,
    tol: float = LEAK_TOL,
) -> LabeledKet:
    """``U1(z) Phi_beta`` on the truncation.

    ``route="displace"`` applies the displacement matrix to the thermal vector.
    ``route="photon-added"`` sums ``sqrt(lambda_n / n!) (A1^+ - conj(z))**n U1(z) Psi[0, n]``.
    Since ``A1^+ - conj(z)`` only raises or keeps the level, truncating it is exact
    on the retained rows.
    """
    leak = _guard(z, K, tol)
    th = thermal_vector(beta, omega, K)
    if route == "displace":
        C = _kms_vector(z, th)
    elif route == "photon-added":
        coh = displacement_matrix(z, K)[:, 0]
        raise_ = _lower(K).T - np.conj(z) * np.eye(K + 1)
        C = np.zeros((K + 1, K + 1), dtype=complex)
        v = coh.copy()
        for k in range(K + 1):
            if k:
                v = raise_ @ v / math.sqrt(k)
            C[:, k] = th.sqrt_weights[k] * v
    else:
        raise ValueError(f"unknown route {route!r}")
    n, l = np.meshgrid(np.arange(K + 1), np.arange(K + 1), indexing="ij")
    return LabeledKet(
        "kms",
        np.column_stack([n.ravel(), l.ravel()]),
        C.ravel(),
        K,
        th.tail_bound + leak,
        {"z": [z.real, z.imag], "beta": beta, "omega": omega, "route": route},
    )


def kms_cs_energy(z: complex, beta: float, K: int, omega: float = 1.0) -> float:
    """Measured ``<H1>`` on a KMS coherent state; diagnostic only."""
    C = kms_cs(z, beta, K, omega=omega).coeffs.reshape(K + 1, K + 1)
    n = np.arange(K + 1)
    return float(np.sum(np.abs(C) ** 2 * omega * (n[:, None] + 0.5)) / np.sum(np.abs(C) ** 2))


def overlap_law(z: complex, n: int, z2: complex, m: int, K: int, tol: float = LEAK_TOL) -> tuple[complex, complex]:
    """``<U1(z) Psi[0,n] | U1(z2) Psi[0,m]>`` on the truncation, and its closed form."""
    _guard(z, K, tol)
    _guard(z2, K, tol)
    if max(n, m) > K:
        raise TruncationUnsafe(f"label beyond K = {K}")
    left = np.zeros((K + 1, K + 1), dtype=complex)
    right = np.zeros((K + 1, K + 1), dtype=complex)
    left[:, n] = displacement_matrix(z, K)[:, 0]
    right[:, m] = displacement_matrix(z2, K)[:, 0]
    value = complex(np.vdot(left, right))
    closed = np.exp(-(abs(z) ** 2 + abs(z2) ** 2) / 2 + np.conj(z) * z2) if n == m else 0j
    return value, complex(closed)


# ---------------------------------------------------------------- phase-space side


def wigner_eval(n: int, l: int, x, y):
    """``Psi[n, l](x, y) = (2 pi)^(-1/2) <l| D(-z) |n>`` with ``z = (y - i x)/sqrt(2)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = (y - 1j * x) / math.sqrt(2.0)
    return displacement_elements(l, n, -z) / math.sqrt(2 * math.pi)


def _ladder_prediction(n: int, l: int, x, y, op: str):
    """Right-hand side of the intertwining relations from the basis action."""
    s2 = math.sqrt(2.0)

    def psi(a, b):
        return wigner_eval(a, b, x, y) if a >= 0 and b >= 0 else 0.0

    if op == "Q1":
        return (math.sqrt(n) * psi(n - 1, l) + math.sqrt(n + 1) * psi(n + 1, l)) / s2
    if op == "P1":
        return (math.sqrt(n) * psi(n - 1, l) - math.sqrt(n + 1) * psi(n + 1, l)) / (1j * s2)
    # right multiplication conjugates the second-index coefficients
    if op == "P2":
        return (math.sqrt(l) * psi(n, l - 1) + math.sqrt(l + 1) * psi(n, l + 1)) / s2
    if op == "Q2":
        return -(math.sqrt(l) * psi(n, l - 1) - math.sqrt(l + 1) * psi(n, l + 1)) / (1j * s2)
    raise ValueError(op)


def _differential(n: int, l: int, x, y, h: float, op: str):
    f = lambda u, v: wigner_eval(n, l, u, v)  # noqa: E731
    dx = (f(x + h, y) - f(x - h, y)) / (2 * h)
    dy = (f(x, y + h) - f(x, y - h)) / (2 * h)
    g = f(x, y)
    if op == "Q1":
        return -1j * dx + y / 2 * g
    if op == "P1":
        return -1j * dy - x / 2 * g
    if op == "Q2":
        return -1j * dy + x / 2 * g
    if op == "P2":
        return -1j * dx - y / 2 * g
    raise ValueError(op)


def intertwining_check(
    pairs: Sequence[tuple[int, int]] = ((0, 0), (1, 0), (1, 1)),
    h: float = 0.01,
    extent: float = 4.0,
    points: int = 41,
    ops: Sequence[str] = ("Q1", "P1"),
    tol: float = 1e-3,
) -> dict[str, float]:
    """Max residual of each differential operator against its ladder action on a grid.

    Refinement rule: the residual at ``h`` is compared with the one at ``h/2``;
    central differences shrink it fourfold, so ``(4/3)|r(h) - r(h/2)|`` estimates
    the discretization error.  Above ``tol`` the grid is refused.
    """
    g = np.linspace(-extent, extent, points)
    X, Y = np.meshgrid(g, g, indexing="ij")
    out = {}
    for op in ops:
        worst = 0.0
        for n, l in pairs:
            pred = _ladder_prediction(n, l, X, Y, op)
            r1 = float(np.max(np.abs(_differential(n, l, X, Y, h, op) - pred)))
            r2 = float(np.max(np.abs(_differential(n, l, X, Y, h / 2, op) - pred)))
            if 4.0 / 3.0 * abs(r1 - r2) > tol:
                raise GridTooCoarse(f"h = {h} gives estimated error {4 / 3 * abs(r1 - r2):.2e} for {op} on ({n}, {l})")
            worst = max(worst, r1)
        out[op] = worst
    return out


# ---------------------------------------------------------------- resolutions of identity


@dataclass(frozen=True)
class BlockResolution:
    block: int
    R: float
    matrix: np.ndarray  # over labels (n, l), n, l < block, row-major
    target: np.ndarray
    residual: float
    notes: list[str] = field(default_factory=list)


def _disk_rule(R: float, radial: int, angular: int):
    """Nodes and weights for ``(1/pi) int_{|z|<=R} d^2 z``; equals ``(1/2pi) dx dy``."""
    u, w = np.polynomial.legendre.leggauss(radial)
    r = 0.5 * R * (u + 1)
    wr = 0.5 * R * w * r
    th = 2 * math.pi * np.arange(angular) / angular
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    weights = (wr[:, None] * np.full(angular, 2 * math.pi / angular)[None, :]).ravel() / math.pi
    return z, weights


def kms_cs_resolution(
    beta: float,
    block: int = 6,
    R: float = 6.0,
    omega: float = 1.0,
    radial: int = 96,
    angular: int = 64,
) -> BlockResolution:
    """Block ``n, l < block`` of ``(1/2pi) int |z,beta><z,beta| dx dy`` over ``|z| <= R``.

    Only the matrix elements with indices inside the block enter, and they are
    exact, so no Fock cutoff is involved.  The integral equals
    ``I (x) rho_beta``: identity in the first label, thermal weights in the second.
    """
    z, w = _disk_rule(R, radial, angular)
    idx = np.arange(block)
    lam = thermal_vector(beta, omega, block - 1).weights
    # amplitude of (n, l) is D[n, l](z) sqrt(lam_l)
    amp = displacement_elements(idx[None, :, None], idx[None, None, :], z[:, None, None]) * np.sqrt(lam)[None, None, :]
    amp = amp.reshape(z.size, block * block)
    M = (amp.T * w) @ np.conj(amp)
    target = np.kron(np.eye(block), np.diag(lam))
    return BlockResolution(block, R, M, target, float(np.max(np.abs(M - target))), ["first label identity, second label thermal"])


def vcs1_resolution(
    block: int = 6,
    R: float = 6.0,
    radial: int = 96,
    angular: int = 64,
) -> BlockResolution:
    """Block of ``(1/(2pi)^2) sum_l int |z, conj(z2); l><...| dx dy dx2 dy2`` over ``|z|, |z2| <= R``.

    The four-dimensional rule is the product of two disk rules; amplitudes of
    ``(n, l)`` are ``exp(-(|z|^2 + |z2|^2)/2) z**n conj(z2)**l / sqrt(n! l!)``.
    """
    z, w = _disk_rule(R, radial, angular)
    idx = np.arange(block)
    coh = displacement_elements(idx[None, :], 0, z[:, None])  # D[n, 0](z)
    coh2 = np.conj(coh)  # conj(z2)**l factors from the conjugated label
    first = (coh.T * w) @ np.conj(coh)  # [n, n']
    second = (coh2.T * w) @ np.conj(coh2)  # [l, l']
    # sum over l keeps only l = l' components
    M = np.kron(first, np.diag(np.diag(second)))
    target = np.eye(block * block)
    return BlockResolution(block, R, M, target, float(np.max(np.abs(M - target))))


def commutant_check(z: complex, z2: complex, K: int, tol: float = LEAK_TOL) -> tuple[float, float]:
    """``||P_inner [U1(z), U2(z2)] P_inner||`` and the leakage bound it is held to."""
    U1 = displacement(z, 1, K, tol)
    U2 = displacement(z2, 2, K, tol)
    comm = (U1 @ U2).matrix - (U2 @ U1).matrix
    ops = build_operators(K)
    res = float(np.linalg.norm(ops.inner_block(comm), 2))
    bound = 2 * (math.sqrt(leakage_estimate(z, K)) + math.sqrt(leakage_estimate(z2, K)))
    return res, bound
