"""Fibonacci anyons: fusion-tree basis and the exact braid representation.

Labels are encoded as integers, ``VAC = 0`` for the vacuum and ``TAU = 1``
for the Fibonacci anyon.  A basis state for ``N`` anyons is the fusion path
``(f_0, f_1, ..., f_N)`` with ``f_0 = 0`` and ``f_1 = tau``, where ``f_j`` is
the total charge of the first ``j`` anyons.  Generator ``B_j`` only changes
``f_j``, with amplitudes set by ``(f_{j-1}, f_j, f_{j+1})``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .braid import BraidWord, Representation, word_unitary
from .errors import InputError, TooLarge

VAC = 0
TAU = 1
MAX_ANYONS = 24

_NAMES = {VAC: "0", TAU: "tau"}


def label_name(f: int) -> str:
    return _NAMES[f]


def parse_charge(text) -> Optional[int]:
    if text is None:
        return None
    s = str(text).strip().lower()
    if s in ("0", "vac", "vacuum"):
        return VAC
    if s in ("tau", "t", "τ"):
        return TAU
    raise InputError(f"unknown total charge {text!r}; use 0 or tau")


@dataclass(frozen=True)
class FibConstants:
    omega: complex
    phi: float

    @classmethod
    def standard(cls) -> "FibConstants":
        q = np.exp(2j * np.pi / 5)
        return cls(omega=complex(-q), phi=float((1 + np.sqrt(5)) / 2))


FIB = FibConstants.standard()
OMEGA = FIB.omega
PHI = FIB.phi


@dataclass(frozen=True)
class FusionBasis:
    n_anyons: int
    paths: tuple[tuple[int, ...], ...]
    total_charge: Optional[int] = None

    def __len__(self):
        return len(self.paths)

    def index(self, path) -> int:
        return self.paths.index(tuple(path))

    def labels(self) -> list[str]:
        return [",".join(label_name(f) for f in p) for p in self.paths]


def basis_counts(n_anyons: int) -> tuple[int, int]:
    """``(Z_N, O_N)``: numbers of paths ending in 0 and in tau."""
    z, o = 1, 0
    for _ in range(n_anyons):
        z, o = o, o + z
    return z, o


def enumerate_basis(n_anyons: int, total_charge: Optional[int] = None) -> FusionBasis:
    """All admissible fusion paths in lexicographic order (0 before tau)."""
    if n_anyons < 1:
        raise InputError("need at least one anyon")
    if n_anyons > MAX_ANYONS:
        raise TooLarge(f"at most {MAX_ANYONS} anyons supported, got {n_anyons}")
    paths: list[tuple[int, ...]] = []

    def extend(prefix: list[int]):
        if len(prefix) == n_anyons + 1:
            if total_charge is None or prefix[-1] == total_charge:
                paths.append(tuple(prefix))
            return
        for f in (VAC, TAU):
            if f == VAC and prefix[-1] == VAC:
                continue
            prefix.append(f)
            extend(prefix)
            prefix.pop()

    extend([VAC, TAU])
    return FusionBasis(n_anyons, tuple(paths), total_charge)


def local_rule(left: int, mid: int, right: int) -> dict[int, complex]:
    """Action of ``B_j`` on the window ``|f_{j-1}, f_j, f_{j+1}>``: new ``f_j`` -> amplitude."""
    w, phi = OMEGA, PHI
    if left == VAC and right == VAC:
        return {TAU: w**-2}
    if left == VAC or right == VAC:
        # |0,tau,tau> and |tau,tau,0>; mid is forced to tau
        return {TAU: w**-1}
    if mid == VAC:
        return {VAC: w**2 / phi, TAU: w / np.sqrt(phi)}
    return {VAC: w / np.sqrt(phi), TAU: -1 / phi}


def _window_matrix(states: list[tuple[int, ...]], pos: int) -> np.ndarray:
    """Matrix of the local rule acting on label ``pos`` of each state in ``states``."""
    index = {s: i for i, s in enumerate(states)}
    m = np.zeros((len(states), len(states)), dtype=complex)
    for i, s in enumerate(states):
        for new, amp in local_rule(s[pos - 1], s[pos], s[pos + 1]).items():
            t = s[:pos] + (new,) + s[pos + 1 :]
            m[index[t], i] += amp
    return m


def fibonacci_rep(n_anyons: int, total_charge: Optional[int] = None) -> Representation:
    if n_anyons < 2:
        raise InputError("braiding needs at least two anyons")
    basis = enumerate_basis(n_anyons, total_charge)
    states = list(basis.paths)
    gens = tuple(_window_matrix(states, j) for j in range(1, n_anyons))
    return Representation(n_anyons, len(states), gens, name=f"fibonacci({n_anyons})")


# Four-label windows |a, f_j, f_{j+1}, b> for the three-strand blocks.
BLOCK_BASES = {
    "00": [(VAC, TAU, TAU, VAC)],
    "0t": [(VAC, TAU, VAC, TAU), (VAC, TAU, TAU, TAU)],
    "t0": [(TAU, VAC, TAU, VAC), (TAU, TAU, TAU, VAC)],
    "tt": [(TAU, VAC, TAU, TAU), (TAU, TAU, VAC, TAU), (TAU, TAU, TAU, TAU)],
}


def block_matrices() -> dict[str, np.ndarray]:
    """``U_ab = rho(B_j)`` and ``V_ab = rho(B_{j+1})`` at fixed outer labels ``a, b``.

    Keys are ``"U00", "V00", "U0t", ...``; basis orders follow ``BLOCK_BASES``.
    """
    out = {}
    for ab, states in BLOCK_BASES.items():
        out["U" + ab] = _window_matrix(states, 1)
        out["V" + ab] = _window_matrix(states, 2)
    return out


def f_matrix() -> np.ndarray:
    """F-move between ``((t1 t2) t3)`` and ``(t1 (t2 t3))`` in the total-tau sector."""
    a, b = 1 / PHI, 1 / np.sqrt(PHI)
    return np.array([[a, b], [b, -a]])


@dataclass(frozen=True)
class AxisAngle:
    axis: np.ndarray
    angle: float
    phase: float  # global phase: u = e^{i phase} exp(-i angle/2 axis.sigma)


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def axis_angle(u: np.ndarray) -> AxisAngle:
    """Bloch-sphere rotation of a 2x2 unitary, using the principal branch of sqrt(det)."""
    u = np.asarray(u, dtype=complex)
    phase = float(np.angle(np.linalg.det(u)) / 2)
    s = np.exp(-1j * phase) * u
    c = np.clip(np.real(np.trace(s)) / 2, -1.0, 1.0)
    angle = 2 * float(np.arccos(c))
    n = np.array([np.real(1j * np.trace(s @ p)) / 2 for p in _PAULI])
    norm = np.linalg.norm(n)
    axis = n / norm if norm > 1e-15 else np.array([0.0, 0.0, 1.0])
    return AxisAngle(axis, angle, phase)


def qubit_gates() -> dict:
    """Single-qubit gates of three anyons with total charge tau.

    Logical basis: ``|0> = |0,tau,0,tau>``, ``|1> = |0,tau,tau,tau>``.
    """
    blocks = block_matrices()
    u, v = blocks["U0t"], blocks["V0t"]
    return {
        "u_gate": u,
        "v_gate": v,
        "u_axis_angle": axis_angle(u),
        "v_axis_angle": axis_angle(v),
    }


def composite_loop_check() -> dict[tuple[int, int], complex]:
    """``W_ab``: the braid ``B_2 B_1^2 B_2`` on three anyons, per ``(a, b) = (f_2, f_3)``.

    Raises if the operator is not diagonal in the fusion basis.
    """
    rep = fibonacci_rep(3)
    basis = enumerate_basis(3)
    w = word_unitary(rep, BraidWord((2, 1, 1, 2), 3))
    off = w - np.diag(np.diag(w))
    if np.max(np.abs(off)) > 1e-12:
        raise ArithmeticError("composite loop is not diagonal in the fusion basis")
    return {(p[2], p[3]): complex(w[i, i]) for i, p in enumerate(basis.paths)}
