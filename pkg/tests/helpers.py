"""Shared randomized-state generators and independent test oracles."""

import cmath
import math

import numpy as np


def ang_dist(a: float, b: float, period: float = 2.0 * math.pi) -> float:
    """Shortest circular distance between two angles."""
    return abs(math.remainder(a - b, period))


def random_bloch(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_state(rng, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_qubit(rng) -> np.ndarray:
    return random_state(rng, 2)


def random_hermitian(rng, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (m + m.conj().T)


def random_unitary(rng, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_spin1_operator(rng) -> np.ndarray:
    """Random traceless Hermitian 3x3 with spectrum exactly {-1, 0, +1}."""
    v = random_unitary(rng, 3)
    return v @ np.diag([1.0, 0.0, -1.0]).astype(complex) @ v.conj().T


def bloch_of(state: np.ndarray) -> np.ndarray:
    """Independent qubit -> Bloch map used as an oracle."""
    a0, a1 = state
    cross = np.conj(a0) * a1
    v = np.array([2 * cross.real, 2 * cross.imag, abs(a0) ** 2 - abs(a1) ** 2])
    return v / np.linalg.norm(v)


def bargmann_argument(qi: np.ndarray, qr: np.ndarray, qf: np.ndarray) -> float:
    """Argument of <i|f><f|r><r|i>, the gauge-invariant triple product."""
    triple = np.vdot(qi, qf) * np.vdot(qf, qr) * np.vdot(qr, qi)
    return cmath.phase(triple)


def qubit_weak_value_rect(qi, qr, qf) -> complex:
    """Direct rectangular projector weak value, written independently."""
    return complex(np.vdot(qf, qr) * np.vdot(qr, qi) / np.vdot(qf, qi))


def qubit_modular_closed_form(vi, vr, vf, alpha, beta) -> complex:
    """Closed-form qubit modular value from Bloch vectors only."""
    volume = float(vf @ np.cross(vr, vi))
    pair = float(vf @ vr) + float(vr @ vi)
    base = 1.0 + float(vf @ vi)
    half = 0.5 * alpha
    value = (math.cos(half) * base
             + math.sin(half) * (volume - 1j * pair)) / base
    return cmath.exp(0.5j * beta) * value


def polar_close(polar, z: complex, tol: float = 1e-10) -> bool:
    """Compare a PolarComplex against a rectangular reference."""
    if abs(polar.modulus - abs(z)) > tol * max(1.0, abs(z)):
        return False
    if abs(z) > 1e-12 and ang_dist(polar.argument, cmath.phase(z)) > tol:
        return False
    return True
