"""Bloch-sphere geometry: qubit/vector maps, projection probabilities,
oriented solid angles of geodesic triangles and quadrangles, axis rotations.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UndefinedSolidAngle
from .numerics import DEFAULT_TOL, Tolerances, canonical_gauge

_NORM_SLACK = 1e-8


def as_bloch(vec, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Validate and renormalize a unit 3-vector."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise ValueError("Bloch vector must have exactly three components")
    if not np.all(np.isfinite(v)):
        raise ValueError("Bloch vector must be finite")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > _NORM_SLACK:
        raise ValueError(f"Bloch vector norm {norm:.6f} deviates from 1 beyond {_NORM_SLACK}")
    return v / norm


def bloch_vector(x: float, y: float, z: float, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return as_bloch([x, y, z], tol=tol)


def as_qubit(state, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Validate, normalize and gauge-fix a two-component amplitude vector."""
    q = np.asarray(state, dtype=complex)
    if q.shape != (2,):
        raise ValueError("qubit state must have exactly two amplitudes")
    if not np.all(np.isfinite(q.real) & np.isfinite(q.imag)):
        raise ValueError("qubit amplitudes must be finite")
    norm = float(np.linalg.norm(q))
    if abs(norm - 1.0) > _NORM_SLACK:
        raise ValueError(f"qubit norm {norm:.6f} deviates from 1 beyond {_NORM_SLACK}")
    return canonical_gauge(q / norm, tol=tol)


def qubit_state(a0, a1, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return as_qubit([a0, a1], tol=tol)


def qubit_to_bloch(state, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unit Bloch vector of a pure qubit state."""
    q = as_qubit(state, tol=tol)
    cross = q[0].conjugate() * q[1]
    v = np.array([2.0 * cross.real, 2.0 * cross.imag, abs(q[0]) ** 2 - abs(q[1]) ** 2])
    return v / np.linalg.norm(v)


def bloch_to_qubit(vec, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Gauge-canonical qubit state of a Bloch vector."""
    v = as_bloch(vec, tol=tol)
    a0 = math.sqrt(max(0.0, 0.5 * (1.0 + v[2])))
    if a0 < 1e-150:
        return np.array([0.0 + 0.0j, 1.0 + 0.0j])
    a1 = complex(v[0], v[1]) / (2.0 * a0)
    q = np.array([a0 + 0.0j, a1])
    return q / np.linalg.norm(q)


def projection_probability(u, v, *, tol: Tolerances = DEFAULT_TOL) -> float:
    """``|<phi_v|phi_u>|^2`` expressed through the Bloch scalar product."""
    a = as_bloch(u, tol=tol)
    b = as_bloch(v, tol=tol)
    return float(np.clip(0.5 * (1.0 + float(a @ b)), 0.0, 1.0))


def _reduce_to_branch(omega: float) -> float:
    # Solid angles live on (-2*pi, 2*pi]; -2*atan2 lands on [-2*pi, 2*pi).
    if omega <= -2.0 * math.pi:
        omega += 4.0 * math.pi
    return omega


def solid_angle_triangle(i, r, f, *, tol: Tolerances = DEFAULT_TOL) -> float:
    """Oriented solid angle of the geodesic triangle traversed i -> r -> f -> i.

    The result lies in (-2*pi, 2*pi] and equals minus twice the argument of the
    Bargmann triple of the three corresponding qubit states.  A configuration
    with both arctangent arguments below ``tol.zero`` (antipodal vertices) has
    no defined value and raises :class:`UndefinedSolidAngle`.
    """
    vi = as_bloch(i, tol=tol)
    vr = as_bloch(r, tol=tol)
    vf = as_bloch(f, tol=tol)
    y = float(vf @ np.cross(vr, vi))
    x = 1.0 + float(vf @ vr) + float(vr @ vi) + float(vf @ vi)
    if abs(x) <= tol.zero and abs(y) <= tol.zero:
        raise UndefinedSolidAngle(
            "triangle contains an antipodal pair; the enclosed area is ambiguous")
    return _reduce_to_branch(-2.0 * math.atan2(y, x))


def rodrigues_rotate(i, r, alpha: float, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Rotate ``i`` about the axis ``r`` by ``alpha`` radians."""
    vi = as_bloch(i, tol=tol)
    vr = as_bloch(r, tol=tol)
    ca, sa = math.cos(alpha), math.sin(alpha)
    s = ca * vi + float(vr @ vi) * (1.0 - ca) * vr + sa * np.cross(vr, vi)
    return s / np.linalg.norm(s)


def solid_angle_quadrangle(i, r, s, f, *, tol: Tolerances = DEFAULT_TOL) -> float:
    """Oriented solid angle of the spherical quadrangle i -> r -> s -> f -> i.

    Defined as the sum of the triangles (i, r, s) and (i, s, f); the shared
    i <-> s geodesic legs cancel.  The raw sum is returned (callers compare
    modulo 4*pi).
    """
    return (solid_angle_triangle(i, r, s, tol=tol)
            + solid_angle_triangle(i, s, f, tol=tol))


def solid_angle_quadrangle_rotation(i, r, f, alpha: float,
                                    *, tol: Tolerances = DEFAULT_TOL) -> float:
    """Closed-form quadrangle solid angle when ``s`` is ``i`` rotated about ``r``.

    Evaluates the quadrangle i -> r -> s -> f -> i without constructing ``s``,
    using only scalar and triple products of the three remaining vectors.  The
    expression is regularized so it stays finite at alpha = pi.
    """
    vi = as_bloch(i, tol=tol)
    vr = as_bloch(r, tol=tol)
    vf = as_bloch(f, tol=tol)
    c = math.cos(0.5 * alpha)
    sn = math.sin(0.5 * alpha)
    volume = float(vf @ np.cross(vr, vi))
    pair = float(vf @ vr) + float(vr @ vi)
    base = 1.0 + float(vf @ vi)
    re = c * c * base + volume * sn * c + pair * sn * sn
    im = sn * c * base + volume * sn * sn - pair * sn * c
    if abs(re) <= tol.zero and abs(im) <= tol.zero:
        raise UndefinedSolidAngle("rotated quadrangle is degenerate; no defined area")
    return _reduce_to_branch(-2.0 * math.atan2(im, re))
