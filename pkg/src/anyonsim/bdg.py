"""One-dimensional topological superconductors.

Two models live here: the continuum Jackiw-Rebbi Dirac equation with a mass
domain wall, solved analytically and checked on a finite-difference grid,
and the Kitaev chain in Bogoliubov-de Gennes (BdG) form, diagonalised
densely.  Units: hbar = 1; chains use lattice constant 1 and energies in
units of the hopping ``t``.

Chain conventions.  The normal part has onsite energy ``2t - mu`` and
hopping ``-t``, so the band bottom sits at ``-mu``: ``mu`` counts filling
above the band bottom and ``0 < mu < 4t`` is topological.  Pairing is
``Delta c_j c_{j+1} + h.c.``, giving the antisymmetric block ``D[j, j+1] =
Delta``.  The BdG matrix in the Nambu basis ``(c_1..c_L, c_1^dag..c_L^dag)``
is ``[[h, D], [D^dag, -h^T]]``.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.ndimage import maximum_filter1d

from .errors import DegenerateFit, InputError, NotNormalizable

log = logging.getLogger(__name__)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# sigma^y eigenvector with eigenvalue +1
CHI_PLUS_Y = np.array([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)]) / np.sqrt(2)


# ---------------------------------------------------------------- continuum


def jr_dispersion(k, m_bar: float, v_f: float = 1.0):
    """Upper and lower bands ``+-sqrt((v_F k)^2 + M^2)``."""
    e = np.sqrt((v_f * np.asarray(k, dtype=float)) ** 2 + m_bar**2)
    return e, -e


@dataclass(frozen=True)
class MassProfile:
    """Mass ``M(x)`` sampled on a uniform grid.

    ``kind`` is ``"tanh"`` (``-M tanh(x/w)``), ``"step"`` (``-M sign(x)``) or
    ``"custom"`` (``samples`` given directly).  The intended sign convention
    is ``M(-inf) = +M``, ``M(+inf) = -M``.
    """

    kind: str
    m_bar: float
    x: np.ndarray
    width: float = 1.0
    samples: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise InputError("grid needs at least 3 points")
        steps = np.diff(x)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise InputError("grid must be uniform and increasing")
        if self.m_bar <= 0:
            raise InputError("m_bar must be positive")
        if self.kind not in ("tanh", "step", "custom"):
            raise InputError(f"unknown mass profile kind {self.kind!r}")
        if self.kind == "custom":
            if self.samples is None or np.shape(self.samples) != x.shape:
                raise InputError("custom profile needs one sample per grid point")
        object.__setattr__(self, "x", x)

    @classmethod
    def tanh(cls, m_bar=1.0, width=1.0, half_length=20.0, spacing=0.01) -> "MassProfile":
        n = int(round(2 * half_length / spacing)) + 1
        return cls("tanh", m_bar, np.linspace(-half_length, half_length, n), width)

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    def values(self) -> np.ndarray:
        if self.kind == "tanh":
            return -self.m_bar * np.tanh(self.x / self.width)
        if self.kind == "step":
            return -self.m_bar * np.sign(self.x)
        return np.asarray(self.samples, dtype=float)

    def has_declared_asymptotics(self) -> bool:
        m = self.values()
        return bool(m[0] > 0.9 * self.m_bar and m[-1] < -0.9 * self.m_bar)


@dataclass
class ZeroMode:
    x: np.ndarray
    spinor: np.ndarray  # shape (n, 2), unit discrete norm
    residual: float

    @property
    def density(self) -> np.ndarray:
        return np.sum(np.abs(self.spinor) ** 2, axis=1)


def jr_hamiltonian_apply(psi: np.ndarray, mass: np.ndarray, spacing: float, v_f: float) -> np.ndarray:
    """``(-i v_F sigma^z d/dx + M sigma^x) psi`` with second-order differences."""
    dpsi = np.gradient(psi, spacing, axis=0, edge_order=2)
    return -1j * v_f * dpsi @ SIGMA_Z.T + mass[:, None] * (psi @ SIGMA_X.T)


def jr_zero_mode(profile: MassProfile, v_f: float = 1.0) -> ZeroMode:
    """Bound state ``N exp(int_0^x M/v_F) chi_+y`` at the mass domain wall."""
    if not profile.has_declared_asymptotics():
        raise NotNormalizable(
            "mass must go from +M at the left edge to -M at the right edge for a bound state"
        )
    x, m = profile.x, profile.values()
    integral = cumulative_trapezoid(m / v_f, x, initial=0.0)
    integral -= np.interp(0.0, x, integral)
    envelope = np.exp(integral - integral.max())
    spinor = envelope[:, None] * CHI_PLUS_Y[None, :]
    spinor /= np.linalg.norm(spinor)
    h_psi = jr_hamiltonian_apply(spinor, m, profile.spacing, v_f)
    return ZeroMode(x, spinor, float(np.linalg.norm(h_psi) / np.linalg.norm(spinor)))


# ---------------------------------------------------------------- lattice


@dataclass(frozen=True)
class ChainSpec:
    n_sites: int
    t: float = 1.0
    delta: float = 0.5
    mu: Union[float, Sequence[float]] = 1.0

    def __post_init__(self):
        if self.n_sites < 4:
            raise InputError("n_sites must be >= 4")
        if self.t <= 0:
            raise InputError("hopping t must be positive")
        if self.delta < 0:
            raise InputError("pairing delta must be non-negative")
        if np.ndim(self.mu) == 1 and len(self.mu) != self.n_sites:
            raise InputError(f"mu profile has {len(self.mu)} entries for {self.n_sites} sites")

    def mu_array(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.mu, dtype=float), (self.n_sites,)).copy()


def bdg_matrix(spec: ChainSpec) -> np.ndarray:
    n, t, d = spec.n_sites, spec.t, spec.delta
    h = np.diag(2 * t - spec.mu_array()) - t * (np.eye(n, k=1) + np.eye(n, k=-1))
    pair = d * (np.eye(n, k=1) - np.eye(n, k=-1))
    return np.block([[h, pair], [pair.T, -h.T]])


def bulk_gap(t: float, delta: float, mu: float, n_k: int = 4001) -> float:
    k = np.linspace(0, np.pi, n_k)
    xi = 2 * t * (1 - np.cos(k)) - mu
    return float(np.min(np.sqrt(xi**2 + (2 * delta * np.sin(k)) ** 2)))


def kitaev_decay_length(t: float, delta: float, mu: float) -> float:
    """Slowest decay length of an end mode of the uniform chain (``inf`` if not bound).

    Zero-energy end solutions go as ``x^j`` with ``(t + D) x^2 - (2t - mu) x + (t - D) = 0``.
    """
    roots = np.roots([t + delta, -(2 * t - mu), t - delta])
    r = float(np.max(np.abs(roots)))
    if r >= 1.0:
        return float("inf")
    return float(-1.0 / np.log(r)) if r > 0 else 0.0


@dataclass
class NearZeroMode:
    energy: float
    center: float
    decay_length: float
    majorana_weights: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "energy": self.energy,
            "center": self.center,
            "decay_length": self.decay_length,
            "majorana_weights": list(self.majorana_weights),
        }


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    ph_defect: float
    near_zero: list[NearZeroMode]

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "ph_defect": self.ph_defect,
            "near_zero": [m.to_json() for m in self.near_zero],
        }


def _decay_from_end_moment(weight: np.ndarray) -> float:
    """Decay length of the amplitude from the mean distance to the nearer end.

    For weight ``r^(2j)`` on a half-infinite chain the mean is ``m = r^2/(1-r^2)``.
    """
    n = weight.size
    pos = np.arange(n)
    m = float(np.sum(weight * np.minimum(pos, n - 1 - pos)) / np.sum(weight))
    return 0.0 if m <= 0 else float(2 / np.log1p(1 / m))


def _describe_mode(energy: float, vec: np.ndarray, n: int) -> NearZeroMode:
    u, v = vec[:n], vec[n:]
    a = np.abs(u + v) ** 2
    b = np.abs(u - v) ** 2
    total = np.abs(u) ** 2 + np.abs(v) ** 2
    center = float(np.sum(np.arange(n) * total) / np.sum(total))
    xi = _decay_from_end_moment(total)
    s = a.sum() + b.sum()
    return NearZeroMode(float(energy), center, xi, (float(a.sum() / s), float(b.sum() / s)))


def chain_spectrum(spec: ChainSpec, zero_tol: Optional[float] = None) -> SpectrumResult:
    """Full BdG spectrum; modes with ``|E| < zero_tol`` (default ``1e-6 t``) are described."""
    tol = 1e-6 * spec.t if zero_tol is None else zero_tol
    e, vecs = np.linalg.eigh(bdg_matrix(spec))
    ph = float(np.max(np.abs(e + e[::-1])))
    near = [_describe_mode(e[i], vecs[:, i], spec.n_sites) for i in np.flatnonzero(np.abs(e) < tol)]
    return SpectrumResult(e, vecs, ph, near)


def end_weight(vec: np.ndarray, n_sites: int, within: float) -> float:
    """Fraction of a BdG eigenvector's weight on sites closer than ``within`` to an end."""
    w = np.abs(vec[:n_sites]) ** 2 + np.abs(vec[n_sites:]) ** 2
    pos = np.arange(n_sites)
    near = np.minimum(pos, n_sites - 1 - pos) < within
    return float(w[near].sum() / w.sum())


def lowest_positive_energy(spec: ChainSpec) -> float:
    e = np.linalg.eigvalsh(bdg_matrix(spec))
    return float(np.min(np.abs(e)))


def domain_wall_chain(base: ChainSpec, d: int, trivial_sites: int) -> ChainSpec:
    """Topological segment of ``d`` sites at ``mu = +mu_bar`` between trivial ``-mu_bar`` segments."""
    mu_bar = float(base.mu)
    mu = np.concatenate([np.full(trivial_sites, -mu_bar), np.full(d, mu_bar), np.full(trivial_sites, -mu_bar)])
    return ChainSpec(int(mu.size), base.t, base.delta, mu)


@dataclass
class ScanResult:
    d: np.ndarray
    epsilon: np.ndarray
    ln_envelope: np.ndarray
    used: np.ndarray
    xi_fit: float
    r_squared: float
    prefactor: float
    xi_guide: float
    xi_lattice: float
    mu_bar: float

    def rows(self):
        return [
            (int(d), float(e), float(l)) for d, e, l in zip(self.d, self.epsilon, self.ln_envelope)
        ]

    def to_json(self) -> dict:
        return {
            "d": [int(x) for x in self.d],
            "epsilon": [float(x) for x in self.epsilon],
            "ln_epsilon_envelope": [float(x) for x in self.ln_envelope],
            "used_in_fit": [bool(x) for x in self.used],
            "xi_fit": self.xi_fit,
            "r_squared": self.r_squared,
            "prefactor": self.prefactor,
            "xi_guide": self.xi_guide,
            "xi_lattice": self.xi_lattice,
            "mu_bar": self.mu_bar,
        }


NOISE_FLOOR = 1e-13


def splitting_scan(
    base: ChainSpec,
    lengths: Sequence[int],
    trivial_sites: int = 60,
    window: int = 3,
    workers: int = 1,
) -> ScanResult:
    """Zero-mode splitting versus topological length ``d``, with an exponential fit.

    ``base.mu`` is the scalar ``mu_bar``.  The fit is least squares of the
    running maximum of ``ln eps`` (window of ``window`` scan points) against
    ``d``, which rides over lattice oscillations of the splitting.  Points
    at the numerical noise floor are left out.
    """
    if np.ndim(base.mu) != 0 or float(base.mu) <= 0:
        raise InputError("splitting_scan needs a scalar mu_bar > 0 in base.mu")
    ds = np.asarray(sorted(int(d) for d in lengths), dtype=int)
    if np.any(ds < 1):
        raise InputError("topological lengths must be positive")
    specs = [domain_wall_chain(base, int(d), trivial_sites) for d in ds]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        eps = np.array(list(pool.map(lowest_positive_energy, specs)))
    mu_bar = float(base.mu)
    xi_guide = 2 * base.delta / mu_bar
    xi_lat = kitaev_decay_length(base.t, base.delta, mu_bar)
    if eps.size == 0:
        raise DegenerateFit("empty scan")
    used = eps > NOISE_FLOOR * base.t
    ln_eps = np.log(np.maximum(eps, np.finfo(float).tiny))
    env = maximum_filter1d(ln_eps, size=window, mode="nearest") if eps.size else ln_eps
    if used.sum() < 3:
        raise DegenerateFit(f"only {int(used.sum())} usable scan points (need 3)")
    slope, intercept = np.polyfit(ds[used], env[used], 1)
    if slope >= 0:
        raise DegenerateFit(f"splitting does not decay (slope {slope:.3g})")
    pred = slope * ds[used] + intercept
    ss_res = float(np.sum((env[used] - pred) ** 2))
    ss_tot = float(np.sum((env[used] - env[used].mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    log.debug("splitting fit slope=%g intercept=%g", slope, intercept)
    return ScanResult(ds, eps, env, used, float(-1 / slope), r2, float(np.exp(intercept)), xi_guide, xi_lat, mu_bar)
