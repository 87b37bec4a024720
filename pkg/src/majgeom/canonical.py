"""Canonicalizing unitaries for three-level triples.

Any triple (initial, projector, final) of qutrits can be rotated so the
projector state has both stellar points at the north pole and the final state
has coincident points in the xz half-plane.  Weak and modular values are
invariant under the rotation, which is what makes the geometric factorization
possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EtaOutOfRange
from .majorana import SymmetricRepresentation, majorana_points, nlevel_state
from .numerics import DEFAULT_TOL, Tolerances

_SQ2 = math.sqrt(2.0)
_SQ3 = math.sqrt(3.0)
_SQ6 = math.sqrt(6.0)


@dataclass(frozen=True)
class StateAngles:
    """Four-angle parametrization
    ``(exp(1j*chi1) cos(eps) sin(theta), exp(1j*chi2) sin(eps) sin(theta), cos(theta))``.

    Also used for the post-rotation final state, where the symbols are
    conventionally renamed (theta -> eta, epsilon -> delta, chi -> xi).
    ``degenerate`` marks sin(theta) = 0, where epsilon and the phases are
    unconstrained and reported as zero.
    """

    theta: float
    epsilon: float
    chi1: float
    chi2: float
    degenerate: bool = False


def anchor_gauge(state, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Strip the global phase using the third component when it is non-zero,
    else the largest-modulus component (documented fallback)."""
    c = np.asarray(state, dtype=complex).copy()
    anchor = c[2] if abs(c[2]) > tol.zero else c[int(np.argmax(np.abs(c)))]
    return c * (anchor.conjugate() / abs(anchor))


def extract_params(state, *, tol: Tolerances = DEFAULT_TOL) -> StateAngles:
    """Angles reproducing a qutrit up to global phase (exactly when the input
    already carries the anchor gauge)."""
    c = anchor_gauge(nlevel_state(state, tol=tol), tol=tol)
    if c.size != 3:
        raise ValueError("parameter extraction is defined for three-level states")
    third = c[2].real if abs(c[2]) > tol.zero else 0.0
    planar = math.hypot(abs(c[0]), abs(c[1]))
    theta = math.atan2(planar, third)
    if planar <= tol.zero:
        return StateAngles(theta, 0.0, 0.0, 0.0, degenerate=True)
    epsilon = math.atan2(abs(c[1]), abs(c[0]))
    chi1 = float(np.angle(c[0])) % (2.0 * math.pi) if abs(c[0]) > tol.zero else 0.0
    chi2 = float(np.angle(c[1])) % (2.0 * math.pi) if abs(c[1]) > tol.zero else 0.0
    return StateAngles(theta, epsilon, chi1, chi2)


def params_to_state(p: StateAngles) -> np.ndarray:
    return np.array([
        np.exp(1j * p.chi1) * math.cos(p.epsilon) * math.sin(p.theta),
        np.exp(1j * p.chi2) * math.sin(p.epsilon) * math.sin(p.theta),
        math.cos(p.theta) + 0.0j,
    ])


def build_U1(psi_r, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unitary mapping ``psi_r`` (anchor-gauged) to ``(0, 0, 1)``."""
    p = extract_params(psi_r, tol=tol)
    e1 = np.exp(-1j * p.chi1)
    e2 = np.exp(-1j * p.chi2)
    ce, se = math.cos(p.epsilon), math.sin(p.epsilon)
    ct, st = math.cos(p.theta), math.sin(p.theta)
    return np.array([
        [-e1 * se, e2 * ce, 0.0],
        [-e1 * ce * ct, -e2 * se * ct, st],
        [e1 * ce * st, e2 * se * st, ct],
    ])


def build_U2_from_params(p: StateAngles, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unitary fixing ``(0, 0, 1)`` that collapses the final state onto
    coincident stellar points."""
    half = math.tan(0.5 * p.theta)
    if half > 1.0 + 1e-12:
        raise EtaOutOfRange(
            f"tan(eta/2) = {half:.6f} > 1; final state is outside the canonical range")
    alpha = p.epsilon + math.acos(min(1.0, half))
    e1 = np.exp(-1j * p.chi1)
    e2 = np.exp(-1j * p.chi2)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array([
        [e1 * ca, e2 * sa, 0.0],
        [e1 * sa, -e2 * ca, 0.0],
        [0.0, 0.0, 1.0],
    ])


def build_U2(psi_f_prime, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return build_U2_from_params(extract_params(psi_f_prime, tol=tol), tol=tol)


def canonical_f_vector(eta: float) -> np.ndarray:
    """Coincident-point location of the canonicalized final state."""
    c = math.cos(eta)
    return np.array([math.sqrt(max(0.0, 4.0 * c * (1.0 - c))), 0.0, 2.0 * c - 1.0])


@dataclass(frozen=True)
class CanonicalTriple:
    """Result of rotating a qutrit triple into the canonical frame.

    ``u_total`` composes both rotations.  The stored states additionally carry
    per-state anchor gauging, so they may differ from ``u_total @ input`` by
    global phases (which weak values ignore).
    """

    u_total: np.ndarray
    r_vec: np.ndarray
    f_vec: np.ndarray
    i_rep: SymmetricRepresentation
    psi_i: np.ndarray
    psi_r: np.ndarray
    psi_f: np.ndarray
    eta: float


def canonicalize_triple(psi_i, psi_r, psi_f,
                        *, tol: Tolerances = DEFAULT_TOL) -> CanonicalTriple:
    """Rotate (initial, projector, final) into the canonical frame.

    Afterwards the projector state has both stellar points at the north pole
    and the final state sits at ``canonical_f_vector(eta)`` with coincident
    points; the initial state's points and normalization are returned.
    """
    states = [anchor_gauge(nlevel_state(s, tol=tol), tol=tol)
              for s in (psi_i, psi_r, psi_f)]
    if any(s.size != 3 for s in states):
        raise ValueError("canonicalization is defined for three-level states")
    u1 = build_U1(states[1], tol=tol)
    states = [anchor_gauge(u1 @ s, tol=tol) for s in states]
    p_final = extract_params(states[2], tol=tol)
    u2 = build_U2_from_params(p_final, tol=tol)
    states = [anchor_gauge(u2 @ s, tol=tol) for s in states]
    eta = p_final.theta
    return CanonicalTriple(
        u_total=u2 @ u1,
        r_vec=np.array([0.0, 0.0, 1.0]),
        f_vec=canonical_f_vector(eta),
        i_rep=majorana_points(states[0], tol=tol),
        psi_i=states[0],
        psi_r=states[1],
        psi_f=states[2],
        eta=eta,
    )


def three_box_transform() -> tuple[np.ndarray, np.ndarray]:
    """The fixed pair of unitaries canonicalizing the three-box scenario."""
    u1 = np.array([
        [-_SQ3, _SQ3, 0.0],
        [-1.0, -1.0, 2.0],
        [_SQ2, _SQ2, _SQ2],
    ], dtype=complex) / _SQ6
    u2 = np.array([
        [-(1.0 + _SQ3), (1.0 - _SQ3), 0.0],
        [(1.0 - _SQ3), (1.0 + _SQ3), 0.0],
        [0.0, 0.0, 2.0 * _SQ2],
    ], dtype=complex) / (2.0 * _SQ2)
    return u1, u2
