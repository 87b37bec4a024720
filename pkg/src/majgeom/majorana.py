"""Stellar (Majorana) representation of N-level states.

A normalized N-component state corresponds to an unordered multiset of N-1
points on the Bloch sphere: the projective roots of its representation
polynomial.  Basis states map downward, ``|0> -> south^(N-1)`` and
``|N-1> -> north^(N-1)``; the general coefficient convention is pinned by the
binomial weights below and reduces to the familiar three-level polynomial
``c0/sqrt(2) - c1 z + c2 z^2 / sqrt(2)`` after an overall scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bloch import bloch_to_qubit
from .numerics import (
    DEFAULT_TOL,
    ProjectiveRoot,
    Tolerances,
    canonical_gauge,
    solve_polynomial,
)

MAX_LEVELS = 8
_NORM_SLACK = 1e-8


def nlevel_state(coeffs, *, tol: Tolerances = DEFAULT_TOL,
                 max_levels: int = MAX_LEVELS) -> np.ndarray:
    """Validate, normalize and gauge-fix an N-level coefficient vector."""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or not 2 <= c.size <= max_levels:
        raise ValueError(f"state dimension must lie in [2, {max_levels}]")
    if not np.all(np.isfinite(c.real) & np.isfinite(c.imag)):
        raise ValueError("state coefficients must be finite")
    norm = float(np.linalg.norm(c))
    if abs(norm - 1.0) > _NORM_SLACK:
        raise ValueError(f"state norm {norm:.6f} deviates from 1 beyond {_NORM_SLACK}")
    return canonical_gauge(c / norm, tol=tol)


@dataclass(frozen=True)
class SymmetricRepresentation:
    """Multiset of N-1 Bloch points plus the symmetrization normalization K.

    Points are stored sorted by (z, x, y) descending so serialized output is
    stable; the multiset itself carries no order.
    """

    points: np.ndarray
    normalization: float


def sort_points(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    order = np.lexsort((-pts[:, 1], -pts[:, 0], -pts[:, 2]))
    return pts[order]


def representation_coefficients(state, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Polynomial coefficients (lowest degree first) of the stellar polynomial."""
    c = nlevel_state(state, tol=tol)
    m = c.size - 1
    weights = np.array([(-1.0) ** k * math.sqrt(math.comb(m, k)) for k in range(m + 1)])
    return weights * c


def root_to_point(root: ProjectiveRoot) -> np.ndarray:
    """Bloch point of a projective root; infinity maps to the south pole."""
    if root.is_infinite:
        return np.array([0.0, 0.0, -1.0])
    z = root.value
    w = abs(z) ** 2
    if not math.isfinite(w) or w > 1e300:
        return np.array([0.0, 0.0, -1.0])
    denom = 1.0 + w
    p = np.array([2.0 * z.real / denom, 2.0 * z.imag / denom, (1.0 - w) / denom])
    return p / np.linalg.norm(p)


def normalization_factor(points, *, tol: Tolerances = DEFAULT_TOL) -> float:
    """K such that K * sum over qubit permutations is normalized.

    Evaluated as ``1/sqrt(m! * perm(G))`` with ``G`` the Gram matrix of the
    qubit states attached to the points; the permanent is computed by direct
    enumeration (m <= 7).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
        raise ValueError("expected an (m, 3) array of Bloch points")
    states = [bloch_to_qubit(p, tol=tol) for p in pts]
    m = len(states)
    gram = np.array([[np.vdot(a, b) for b in states] for a in states])
    permanent = 0.0 + 0.0j
    for perm in itertools.permutations(range(m)):
        term = 1.0 + 0.0j
        for row, col in enumerate(perm):
            term *= gram[row, col]
        permanent += term
    value = math.factorial(m) * permanent.real
    if value <= 0.0:
        raise ValueError("symmetrized state has vanishing norm")
    return 1.0 / math.sqrt(value)


def majorana_points(state, *, tol: Tolerances = DEFAULT_TOL) -> SymmetricRepresentation:
    """Stellar representation of a state: N-1 Bloch points and K."""
    coeffs = representation_coefficients(state, tol=tol)
    roots = solve_polynomial(coeffs, tol=tol)
    pts = sort_points(np.array([root_to_point(r) for r in roots]))
    return SymmetricRepresentation(pts, normalization_factor(pts, tol=tol))


def symmetrize(points, *, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """State whose stellar representation is the given point multiset.

    Returns the gauge-canonical state together with the normalization K.  The
    construction multiplies the projective linear factors ``u z - v`` of the
    qubit pairs, so points at the south pole (roots at infinity) lower the
    polynomial degree without special handling.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("expected an (m, 3) array of Bloch points")
    m = pts.shape[0]
    if not 1 <= m <= MAX_LEVELS - 1:
        raise ValueError(f"point count must lie in [1, {MAX_LEVELS - 1}]")
    poly = np.array([1.0 + 0.0j])
    for p in pts:
        u, v = bloch_to_qubit(p, tol=tol)
        poly = np.convolve(poly, np.array([-v, u]))
    # poly has length m+1 but leading entries vanish for south-pole points;
    # pad back to full length so coefficient slots line up with basis labels.
    padded = np.zeros(m + 1, dtype=complex)
    padded[: poly.size] = poly
    weights = np.array([(-1.0) ** k * math.sqrt(math.comb(m, k)) for k in range(m + 1)])
    c = padded / weights
    state = canonical_gauge(c / np.linalg.norm(c), tol=tol)
    return state, normalization_factor(pts, tol=tol)


def discriminant_degeneracy(state, *, tol: Tolerances = DEFAULT_TOL) -> float:
    """|discriminant| of the three-level stellar polynomial.

    Zero (within tolerance) exactly when the two points coincide, including
    the doubly-infinite case.
    """
    c = nlevel_state(state, tol=tol)
    if c.size != 3:
        raise ValueError("discriminant diagnostic is defined for three-level states")
    return float(abs(2.0 * c[1] * c[1] - 4.0 * c[0] * c[2]))


@dataclass(frozen=True)
class QutritAngles:
    """Closed-form root angles of the three-level stellar polynomial.

    The roots are ``tan(beta_k/2) * exp(1j*alpha_k)``; ``s``, ``rho`` and
    ``chi_tilde`` are the auxiliaries of the closed form.  ``degenerate`` flags
    a (near-)double root.
    """

    alpha_1: float
    alpha_2: float
    beta_1: float
    beta_2: float
    s: float
    rho: float
    chi_tilde: float
    degenerate: bool = False

    def roots(self) -> tuple[complex, complex]:
        z1 = math.tan(0.5 * self.beta_1) * complex(math.cos(self.alpha_1),
                                                   math.sin(self.alpha_1))
        z2 = math.tan(0.5 * self.beta_2) * complex(math.cos(self.alpha_2),
                                                   math.sin(self.alpha_2))
        return z1, z2

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        p1 = np.array([math.cos(self.alpha_1) * math.sin(self.beta_1),
                       math.sin(self.alpha_1) * math.sin(self.beta_1),
                       math.cos(self.beta_1)])
        p2 = np.array([math.cos(self.alpha_2) * math.sin(self.beta_2),
                       math.sin(self.alpha_2) * math.sin(self.beta_2),
                       math.cos(self.beta_2)])
        return p1, p2


def _polish_root_angles(alpha: float, beta: float, lin: complex,
                        const: complex) -> tuple[float, float]:
    """Newton-refine a root of ``z^2 + lin*z + const`` keeping the angle branch."""
    z = math.tan(0.5 * beta) * complex(math.cos(alpha), math.sin(alpha))
    for _ in range(2):
        residual = (z + lin) * z + const
        slope = 2.0 * z + lin
        if abs(slope) < 1e-8:
            break
        step = residual / slope
        if abs(step) > 0.5 * max(1.0, abs(z)):
            break
        z = z - step
    raw = math.atan2(z.imag, z.real)
    alpha_polished = raw + 2.0 * math.pi * round((alpha - raw) / (2.0 * math.pi))
    return alpha_polished, 2.0 * math.atan(abs(z))


def qutrit_roots_closed_form(theta: float, epsilon: float, chi1: float, chi2: float,
                             *, tol: Tolerances = DEFAULT_TOL) -> QutritAngles:
    """Closed-form roots for the state
    ``(exp(1j*chi1) cos(eps) sin(theta), exp(1j*chi2) sin(eps) sin(theta), cos(theta))``.

    Valid for ``theta`` in [0, pi/2) and ``epsilon`` in [0, pi/2], where the
    root-modulus product ``cos(eps) tan(theta)`` is non-negative.
    """
    if not 0.0 <= theta < 0.5 * math.pi:
        raise ValueError("theta must lie in [0, pi/2)")
    if not 0.0 <= epsilon <= 0.5 * math.pi:
        raise ValueError("epsilon must lie in [0, pi/2]")
    t = math.tan(theta)
    ce, se = math.cos(epsilon), math.sin(epsilon)
    chi_tilde = (2.0 * chi2 - chi1) / 2.0 % (2.0 * math.pi)
    branch = 1.0 if chi_tilde < math.pi else -1.0

    rho = (4.0 * ce * ce * t * t + se**4 * t**4
           - 4.0 * ce * se * se * t**3 * math.cos(2.0 * chi_tilde))
    s = math.sqrt(max(0.0, 2.0 * ce * t + se * se * t * t + math.sqrt(max(0.0, rho))))
    product = ce * t
    spread = math.sqrt(max(0.0, s * s - 4.0 * product))
    # Index convention: branch 2 is the root that can align against the
    # postselection axis (the singular one in the scan), branch 1 stays
    # continuous across the weak-value divergence.
    beta_1 = 2.0 * math.atan(0.5 * (s - spread))
    beta_2 = 2.0 * math.atan(0.5 * (s + spread))

    if s <= tol.zero:
        alpha_1 = alpha_2 = 0.5 * chi1
    else:
        cos_arg = min(1.0, max(-1.0, math.sqrt(2.0) * se * t * math.cos(chi_tilde) / s))
        delta = math.acos(cos_arg)
        alpha_1 = 0.5 * chi1 - branch * delta
        alpha_2 = 0.5 * chi1 + branch * delta
        # Newton-polish against the exact monic polynomial; the nested square
        # roots above lose ~8 digits in unlucky regimes and downstream solid
        # angles amplify root errors near singular configurations.
        lin = -math.sqrt(2.0) * se * t * np.exp(1j * chi2)
        const = ce * t * np.exp(1j * chi1)
        alpha_1, beta_1 = _polish_root_angles(alpha_1, beta_1, lin, const)
        alpha_2, beta_2 = _polish_root_angles(alpha_2, beta_2, lin, const)

    disc = abs(2.0 * se * se * t * t * np.exp(2j * chi2) - 4.0 * ce * t * np.exp(1j * chi1))
    degenerate = bool(disc <= tol.comparison or s <= tol.zero)
    return QutritAngles(alpha_1, alpha_2, beta_1, beta_2, s, rho, chi_tilde, degenerate)


def entanglement_entropy(points, *, tol: Tolerances = DEFAULT_TOL) -> float:
    """Von Neumann entropy (bits) of either qubit of a symmetrized point pair.

    0 for coincident points (separable), 1 for antipodal points (Bell state).
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape != (2, 3):
        raise ValueError("entropy diagnostic needs exactly two Bloch points")
    q1 = bloch_to_qubit(pts[0], tol=tol)
    q2 = bloch_to_qubit(pts[1], tol=tol)
    psi = np.kron(q1, q2) + np.kron(q2, q1)
    psi = psi / np.linalg.norm(psi)
    amp = psi.reshape(2, 2)
    rho = amp @ amp.conj().T
    evals = np.clip(np.linalg.eigvalsh(rho).real, 0.0, 1.0)
    entropy = -sum(v * math.log2(v) for v in evals if v > 1e-15)
    return float(np.clip(entropy, 0.0, 1.0))
