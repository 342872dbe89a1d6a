"""Adiabatic exchange of Majorana zero modes in a Y-junction.

Four Majoranas: the central ``g0`` couples to the three outer ones ``g1, g2,
g3`` through ``H = i sum_k eps_k g0 g_k``.  Junction labels map onto the
algebra as ``g0 -> gamma_1``, ``g_k -> gamma_{k+1}``.  With ``mirror=True``
the outer legs 1 and 2 are swapped, which describes the mirror-image
junction.

The ground-space transport is generated by the Kato field
``K^k = i[P, d_k P]``; the holonomy of a coupling path is the ordered
product of ``exp(i K(eps_mid) . d eps)`` over its discretisation, earliest
step applied first.  Couplings are in units of ``epsilon_bar = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .compiler import distance
from .errors import GapClosed, InputError
from .ising import MajoranaAlgebra, build_algebra

GAP_TOL = 1e-12


@lru_cache(maxsize=2)
def junction_operators(mirror: bool = False) -> tuple[np.ndarray, ...]:
    """``(g0, g1, g2, g3)`` as 4x4 matrices."""
    g = build_algebra(4).gammas
    return (g[0], g[2], g[1], g[3]) if mirror else tuple(g)


def _ops(alg: Optional[MajoranaAlgebra], mirror: bool):
    if alg is None:
        return junction_operators(mirror)
    if alg.n_majoranas != 4:
        raise InputError("the junction needs an algebra with 4 Majoranas")
    g = alg.gammas
    return (g[0], g[2], g[1], g[3]) if mirror else tuple(g)


def junction_hamiltonian(eps, alg: Optional[MajoranaAlgebra] = None, mirror: bool = False) -> np.ndarray:
    g0, *outer = _ops(alg, mirror)
    eg = sum(float(e) * gk for e, gk in zip(eps, outer))
    return 1j * g0 @ eg


def _checked_norm(eps, epsilon_bar: float = 1.0) -> float:
    n = float(np.linalg.norm(eps))
    if n < GAP_TOL * epsilon_bar:
        raise GapClosed(f"|eps| = {n:.3g} closes the gap")
    return n


def ground_projector(eps, mirror: bool = False) -> np.ndarray:
    """Projector ``(|eps| - H) / 2|eps|`` onto the doubly degenerate ground space."""
    n = _checked_norm(eps)
    return (n * np.eye(4) - junction_hamiltonian(eps, mirror=mirror)) / (2 * n)


def kato_field(eps, k: int, mirror: bool = False) -> np.ndarray:
    """Closed form ``K^k = (i / 2|eps|^2) (eps.g - eps_k g_k) g_k``; ``k`` in 1..3."""
    if k not in (1, 2, 3):
        raise InputError(f"coupling index must be 1, 2 or 3, got {k}")
    n = _checked_norm(eps)
    _, *outer = junction_operators(mirror)
    rest = sum(float(eps[j]) * outer[j] for j in range(3) if j != k - 1)
    if np.isscalar(rest):
        return np.zeros((4, 4), dtype=complex)
    return 1j / (2 * n**2) * rest @ outer[k - 1]


def kato_field_numeric(eps, k: int, h: float = 1e-5, mirror: bool = False) -> np.ndarray:
    """``i[P, d_k P]`` with a central finite difference of the projector."""
    e = np.asarray(eps, dtype=float)
    ep, em = e.copy(), e.copy()
    ep[k - 1] += h
    em[k - 1] -= h
    dp = (ground_projector(ep, mirror) - ground_projector(em, mirror)) / (2 * h)
    p = ground_projector(e, mirror)
    return 1j * (p @ dp - dp @ p)


@dataclass(frozen=True)
class Leg:
    k: int
    start: float
    stop: float


@dataclass(frozen=True)
class CouplingPath:
    """Piecewise-linear coupling path; each leg ramps one coupling, the others held.

    The initial value of each coupling is the ``start`` of the first leg that
    moves it (0 if it never moves).
    """

    legs: tuple[Leg, ...]
    epsilon_bar: float = 1.0

    def __post_init__(self):
        legs = tuple(l if isinstance(l, Leg) else Leg(*l) for l in self.legs)
        for leg in legs:
            if leg.k not in (1, 2, 3):
                raise InputError(f"coupling index must be 1, 2 or 3, got {leg.k}")
        object.__setattr__(self, "legs", legs)
        current = self.start_vector()
        for i, leg in enumerate(legs):
            if abs(current[leg.k - 1] - leg.start) > 1e-12 * self.epsilon_bar:
                raise InputError(
                    f"leg {i} starts eps_{leg.k} at {leg.start}, but the path is at {current[leg.k - 1]}"
                )
            lo = current.copy()
            hi = current.copy()
            lo[leg.k - 1], hi[leg.k - 1] = leg.start, leg.stop
            if _min_norm_on_segment(lo, hi) < GAP_TOL * self.epsilon_bar:
                raise GapClosed(f"leg {i} passes through eps = 0")
            current[leg.k - 1] = leg.stop

    def start_vector(self) -> np.ndarray:
        v = np.zeros(3)
        seen = set()
        for leg in self.legs:
            if leg.k not in seen:
                v[leg.k - 1] = leg.start
                seen.add(leg.k)
        return v

    def end_vector(self) -> np.ndarray:
        v = self.start_vector()
        for leg in self.legs:
            v[leg.k - 1] = leg.stop
        return v

    @property
    def is_closed(self) -> bool:
        return bool(np.allclose(self.start_vector(), self.end_vector(), atol=1e-12))

    def min_gap(self) -> float:
        current = self.start_vector()
        best = float(np.linalg.norm(current))
        for leg in self.legs:
            a, b = current.copy(), current.copy()
            a[leg.k - 1], b[leg.k - 1] = leg.start, leg.stop
            best = min(best, _min_norm_on_segment(a, b))
            current = b
        return best

    def to_json(self, steps_per_leg: Optional[int] = None) -> dict:
        out = {"legs": [{"k": l.k, "from": l.start, "to": l.stop} for l in self.legs]}
        if steps_per_leg is not None:
            out["steps_per_leg"] = steps_per_leg
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CouplingPath":
        unknown = set(data) - {"legs", "steps_per_leg", "epsilon_bar"}
        if unknown:
            raise InputError(f"unknown path keys: {sorted(unknown)}")
        legs = []
        for leg in data["legs"]:
            extra = set(leg) - {"k", "from", "to"}
            if extra:
                raise InputError(f"unknown leg keys: {sorted(extra)}")
            legs.append(Leg(int(leg["k"]), float(leg["from"]), float(leg["to"])))
        return cls(tuple(legs), float(data.get("epsilon_bar", 1.0)))


def _min_norm_on_segment(a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    dd = float(d @ d)
    s = 0.0 if dd == 0 else float(np.clip(-(a @ d) / dd, 0.0, 1.0))
    return float(np.linalg.norm(a + s * d))


@dataclass(frozen=True)
class KatoConfig:
    steps_per_leg: int = 1000

    def __post_init__(self):
        if self.steps_per_leg < 2:
            raise InputError("steps_per_leg must be >= 2")


def evolve_path(path: CouplingPath, cfg: KatoConfig = KatoConfig(), mirror: bool = False) -> np.ndarray:
    """Ordered product of midpoint Kato steps along ``path`` (4x4 unitary)."""
    u = np.eye(4, dtype=complex)
    eps = path.start_vector()
    n = cfg.steps_per_leg
    for leg in path.legs:
        grid = np.linspace(leg.start, leg.stop, n + 1)
        for lo, hi in zip(grid[:-1], grid[1:]):
            mid = eps.copy()
            mid[leg.k - 1] = 0.5 * (lo + hi)
            u = expm(1j * (hi - lo) * kato_field(mid, leg.k, mirror)) @ u
        eps[leg.k - 1] = leg.stop
    return u


def exchange_path(epsilon_bar: float = 1.0) -> CouplingPath:
    """Closed six-leg path exchanging the modes on legs 1 and 2, starting at ``(0, 0, eps)``."""
    e = epsilon_bar
    return CouplingPath(
        (Leg(1, 0, e), Leg(3, e, 0), Leg(2, 0, e), Leg(1, e, 0), Leg(3, 0, e), Leg(2, e, 0)),
        epsilon_bar,
    )


def elementary_moves(epsilon_bar: float = 1.0) -> tuple[CouplingPath, CouplingPath, CouplingPath]:
    """The three two-leg moves of the exchange, in order: 1->3, 2->1, 3->2."""
    legs = exchange_path(epsilon_bar).legs
    return tuple(CouplingPath(legs[i : i + 2], epsilon_bar) for i in (0, 2, 4))


def fixed_phase_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``range(p)``; first significant entry of each column made real positive."""
    w, v = np.linalg.eigh(p)
    v = v[:, w > 0.5]
    for j in range(v.shape[1]):
        col = v[:, j]
        i = int(np.argmax(np.abs(col) > 1e-10))
        v[:, j] = col * np.exp(-1j * np.angle(col[i]))
    return v


def ground_block(u: np.ndarray, start, end=None, mirror: bool = False) -> np.ndarray:
    """``V_end^dag u V_start`` for fixed-phase ground-space bases at the path ends."""
    vs = fixed_phase_basis(ground_projector(start, mirror))
    ve = vs if end is None else fixed_phase_basis(ground_projector(end, mirror))
    return ve.conj().T @ u @ vs


def exchange_reference(mirror: bool = False) -> np.ndarray:
    """``(1 - g1 g2) / sqrt 2`` in fixed algebra labels; its adjoint for the mirrored junction."""
    g = junction_operators(False)
    r = (np.eye(4) - g[1] @ g[2]) / np.sqrt(2)
    return r.conj().T if mirror else r


def move_reference(src: int, dst: int) -> np.ndarray:
    """``exp(pi/4 g_src g_dst) = (1 + g_src g_dst) / sqrt 2`` for a single move."""
    g = junction_operators(False)
    return (np.eye(4) + g[src] @ g[dst]) / np.sqrt(2)


@dataclass
class HolonomyResult:
    unitary: np.ndarray
    block: np.ndarray
    reference_block: np.ndarray
    distance: float
    full_distance: float
    steps_per_leg: int

    def to_json(self) -> dict:
        def cj(a):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a)]

        return {
            "steps_per_leg": self.steps_per_leg,
            "ground_block": cj(self.block),
            "reference_block": cj(self.reference_block),
            "ground_block_distance": self.distance,
            "full_distance": self.full_distance,
        }


def compare_holonomy(path: CouplingPath, reference: np.ndarray, cfg: KatoConfig, mirror=False) -> HolonomyResult:
    u = evolve_path(path, cfg, mirror)
    start, end = path.start_vector(), path.end_vector()
    blk = ground_block(u, start, end, mirror)
    ref = ground_block(reference, start, end, mirror)
    return HolonomyResult(u, blk, ref, distance(blk, ref, check=False),
                          distance(u, reference, check=False), cfg.steps_per_leg)


def exchange_holonomy(cfg: KatoConfig = KatoConfig(), mirror: bool = False) -> HolonomyResult:
    return compare_holonomy(exchange_path(), exchange_reference(mirror), cfg, mirror)


def single_move_holonomy(cfg: KatoConfig = KatoConfig(2000)) -> HolonomyResult:
    """The 1 -> 3 move against ``(1 + g1 g3)/sqrt 2``.

    The path is open, so the ground blocks are compared in the frames fixed
    at its two ends; this comparison depends on that frame convention.
    """
    return compare_holonomy(elementary_moves()[0], move_reference(1, 3), cfg)


def single_leg_integral(eps_perp: float, start: float, stop: float) -> float:
    """``int d eps_k / (2 |eps|^2) = arctan(eps_k / eps_perp) / (2 eps_perp)`` between the limits."""
    return float((np.arctan(stop / eps_perp) - np.arctan(start / eps_perp)) / (2 * eps_perp))
