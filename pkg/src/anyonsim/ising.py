"""Majorana zero modes: Clifford algebra, Ising braid representation and fusion.

Occupation basis ordering is little-endian: basis index ``i`` has mode ``j``
(1-indexed) occupied when bit ``j-1`` of ``i`` is set.  Majoranas are
labelled 1..2M with ``gamma_{2j-1}``, ``gamma_{2j}`` forming Dirac mode ``j``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .braid import BraidWord, Representation, as_word, word_unitary
from .errors import NotAMatching, NotNormalized, OddCount, TooLarge, WrongSize

MAX_MAJORANAS = 16
RNG_NAME = "numpy.random.PCG64"

Pairing = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class MajoranaAlgebra:
    n_majoranas: int
    gammas: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.gammas[0].shape[0]

    @property
    def n_modes(self) -> int:
        return self.n_majoranas // 2

    def gamma(self, i: int) -> np.ndarray:
        return self.gammas[i - 1]

    def bilinear(self, a: int, b: int) -> np.ndarray:
        """``-i gamma_a gamma_b``; for ``a != b`` a Hermitian operator with eigenvalues +-1."""
        return -1j * self.gammas[a - 1] @ self.gammas[b - 1]

    def parity(self, j: int) -> np.ndarray:
        return self.bilinear(2 * j - 1, 2 * j)

    def total_parity(self) -> np.ndarray:
        p = np.eye(self.dim, dtype=complex)
        for j in range(1, self.n_modes + 1):
            p = p @ self.parity(j)
        return p

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def occupation_state(self, occupations: Sequence[int]) -> np.ndarray:
        idx = sum(int(n) << j for j, n in enumerate(occupations))
        v = np.zeros(self.dim, dtype=complex)
        v[idx] = 1.0
        return v


def build_algebra(n_majoranas: int) -> MajoranaAlgebra:
    """Jordan-Wigner construction with ``-i g_{2j-1} g_{2j} = (-1)^{n_j}``."""
    if n_majoranas % 2 or n_majoranas < 2:
        raise OddCount(f"need an even, positive number of Majoranas, got {n_majoranas}")
    if n_majoranas > MAX_MAJORANAS:
        raise TooLarge(f"at most {MAX_MAJORANAS} Majoranas supported, got {n_majoranas}")
    m = n_majoranas // 2
    dim = 2**m
    idx = np.arange(dim)
    gammas = []
    for j in range(m):
        bit = 1 << j
        lower = np.zeros((dim, dim))
        occ = (idx & bit) != 0
        lower[idx[occ] ^ bit, idx[occ]] = 1.0
        # parity string over modes below j
        below = np.array([bin(i & (bit - 1)).count("1") for i in idx])
        c = np.diag((-1.0) ** below) @ lower
        cd = c.T
        g1 = (c + cd).astype(complex)
        g2 = -1j * (c - cd)
        for g in (g1, g2):
            g.setflags(write=False)
        gammas.extend([g1, g2])
    return MajoranaAlgebra(n_majoranas, tuple(gammas))


def ising_generator(alg: MajoranaAlgebra, j: int) -> np.ndarray:
    """``exp(-pi/4 g_j g_{j+1}) = (1 - g_j g_{j+1}) / sqrt 2``."""
    return (np.eye(alg.dim) - alg.gamma(j) @ alg.gamma(j + 1)) / np.sqrt(2)


def ising_rep(alg: MajoranaAlgebra) -> Representation:
    gens = tuple(ising_generator(alg, j) for j in range(1, alg.n_majoranas))
    return Representation(alg.n_majoranas, alg.dim, gens, name=f"ising({alg.n_majoranas})")


@dataclass(frozen=True)
class LogicalEncoding:
    """Qubit in the even-parity sector of four Majoranas: ``|0> = |00>``, ``|1> = |11>``."""

    algebra: MajoranaAlgebra
    sector_basis: np.ndarray  # 4x2 isometry, columns |00>, |11>
    sigma_z: np.ndarray
    sigma_x: np.ndarray

    def restrict(self, op: np.ndarray) -> np.ndarray:
        v = self.sector_basis
        return v.conj().T @ op @ v

    def embed(self, logical_state: np.ndarray) -> np.ndarray:
        return self.sector_basis @ np.asarray(logical_state, dtype=complex)


def logical_encoding(alg: MajoranaAlgebra) -> LogicalEncoding:
    if alg.n_majoranas != 4:
        raise WrongSize(f"logical encoding needs exactly 4 Majoranas, got {alg.n_majoranas}")
    v = np.zeros((4, 2), dtype=complex)
    v[0b00, 0] = 1.0
    v[0b11, 1] = 1.0
    sz = v.conj().T @ alg.bilinear(1, 2) @ v
    sx = v.conj().T @ alg.bilinear(2, 3) @ v
    return LogicalEncoding(alg, v, sz, sx)


def parse_pairing(text: str) -> Pairing:
    """Parse ``"(1,3)(2,4)"`` into ``((1, 3), (2, 4))``."""
    stripped = re.sub(r"\s+", "", text)
    pairs = re.findall(r"\((-?\d+),(-?\d+)\)", stripped)
    if not pairs or "".join(f"({a},{b})" for a, b in pairs) != stripped:
        raise NotAMatching(f"cannot parse pairing {text!r}; expected e.g. '(1,3)(2,4)'")
    return tuple((int(a), int(b)) for a, b in pairs)


def validate_pairing(pairing: Sequence[Sequence[int]], n_majoranas: int) -> Pairing:
    pairs = tuple((int(a), int(b)) for a, b in pairing)
    labels = [x for p in pairs for x in p]
    if sorted(labels) != list(range(1, n_majoranas + 1)):
        raise NotAMatching(
            f"pairing {pairs} is not a perfect matching of Majoranas 1..{n_majoranas}"
        )
    return pairs


@dataclass(frozen=True)
class FusionDistribution:
    pairing: Pairing
    outcomes: dict[str, float]
    counts: Optional[dict[str, int]] = None
    seed: Optional[int] = None
    rng: Optional[str] = None

    def probability(self, bits: str) -> float:
        return self.outcomes.get(bits, 0.0)

    def frequencies(self) -> dict[str, float]:
        total = sum(self.counts.values())
        return {k: v / total for k, v in self.counts.items()}

    def to_json(self) -> dict:
        out = {
            "pairing": [list(p) for p in self.pairing],
            "probabilities": {k: float(v) for k, v in self.outcomes.items()},
        }
        if self.counts is not None:
            out["counts"] = dict(self.counts)
        out["seed"] = self.seed
        if self.rng is not None:
            out["rng"] = self.rng
        return out


def _pair_projector(alg: MajoranaAlgebra, a: int, b: int, bit: str) -> np.ndarray:
    sign = 1.0 if bit == "0" else -1.0
    return (np.eye(alg.dim) + sign * alg.bilinear(a, b)) / 2


def fusion_distribution(
    alg: MajoranaAlgebra,
    state: np.ndarray,
    pairing: Sequence[Sequence[int]],
    shots: Optional[int] = None,
    seed: Optional[int] = None,
) -> FusionDistribution:
    """Outcome statistics of fusing the given (positional) Majorana pairs.

    Outcome bit ``j`` is 0 when ``-i g_a g_b`` of pair ``j`` reads +1 (empty
    Dirac mode) and 1 when it reads -1.
    """
    pairs = validate_pairing(pairing, alg.n_majoranas)
    psi = np.asarray(state, dtype=complex).reshape(-1)
    if psi.shape != (alg.dim,):
        raise NotNormalized(f"state has dimension {psi.size}, expected {alg.dim}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise NotNormalized(f"state norm {np.linalg.norm(psi):.3g} != 1")

    # product of the pair bilinears equals sign * (total parity)
    prod = np.eye(alg.dim, dtype=complex)
    for a, b in pairs:
        prod = prod @ alg.bilinear(a, b)
    total = alg.total_parity()
    pairing_sign = float(np.real(np.trace(prod @ total))) / alg.dim
    state_parity = float(np.real(np.vdot(psi, total @ psi)))
    definite = abs(abs(state_parity) - 1.0) < 1e-12

    outcomes: dict[str, float] = {}
    for bits in itertools.product("01", repeat=len(pairs)):
        key = "".join(bits)
        if definite:
            eig = (-1) ** key.count("1")
            if eig != round(pairing_sign * np.sign(state_parity)):
                outcomes[key] = 0.0
                continue
        v = psi
        for (a, b), bit in zip(pairs, key):
            v = _pair_projector(alg, a, b, bit) @ v
        outcomes[key] = float(np.vdot(v, v).real)
    norm = sum(outcomes.values())
    outcomes = {k: p / norm for k, p in outcomes.items()}

    counts = None
    if shots is not None:
        counts = sample_counts(outcomes, shots, seed)
    return FusionDistribution(pairs, outcomes, counts, seed, RNG_NAME if shots is not None else None)


def sample_counts(outcomes: dict[str, float], shots: int, seed: Optional[int]) -> dict[str, int]:
    """Multinomial shot counts from a seeded PCG64 stream (outcome order as given)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    keys = list(outcomes)
    p = np.array([outcomes[k] for k in keys])
    p = np.clip(p, 0.0, None)
    draws = rng.multinomial(int(shots), p / p.sum())
    return {k: int(n) for k, n in zip(keys, draws)}


def braid_then_fuse(
    word: BraidWord | Sequence[int],
    pairing: Sequence[Sequence[int]],
    shots: Optional[int] = None,
    seed: Optional[int] = None,
    n_majoranas: int = 4,
) -> FusionDistribution:
    """Split all pairs from the vacuum, braid, then fuse.

    ``pairing`` names Majoranas by their *initial* labels: each labelled
    zero mode is followed through the braid's permutation, and the fusion
    measures the pair of positions the two labelled modes occupy at the end.
    So ``word=[2]`` with pairing ``(1,3)(2,4)`` fuses positions (1,2) and
    (3,4), where modes 1,3 and 2,4 now sit.
    """
    alg = build_algebra(n_majoranas)
    w = as_word(word, n_majoranas)
    pairs = validate_pairing(pairing, n_majoranas)
    final = w.permutation()
    positional = tuple(tuple(sorted((final[a - 1], final[b - 1]))) for a, b in pairs)
    psi = word_unitary(ising_rep(alg), w) @ alg.vacuum()
    dist = fusion_distribution(alg, psi, positional, shots=shots, seed=seed)
    return FusionDistribution(pairs, dist.outcomes, dist.counts, seed, dist.rng)
