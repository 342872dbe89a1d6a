"""Phase-invariant gate distance and exhaustive weave search.

A weave moves one mobile anyon, sitting at position 2 of three, in full
loops around its left neighbour (``B_1^{+-2}``) or its right neighbour
(``B_2^{+-2}``).  The search enumerates canonical weaves by increasing
length and keeps the one closest to a target three-anyon unitary.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .braid import BraidWord, op_norm, unitarity_defect, word_unitary
from .errors import DimensionMismatch, InputError, InvalidWeave, NotUnitary
from .fibonacci import TAU, VAC, block_matrices, enumerate_basis, fibonacci_rep

log = logging.getLogger(__name__)

MOVES: tuple[tuple[int, int], ...] = ((1, -2), (1, 2), (2, -2), (2, 2))
TIE_DECIMALS = 12

# Three-anyon fusion basis (f_2, f_3): |0,tau>, |tau,0>, |tau,tau>.
_BASIS3 = enumerate_basis(3).paths
TAU_SECTOR = [i for i, p in enumerate(_BASIS3) if p[-1] == TAU]
VAC_SECTOR = [i for i, p in enumerate(_BASIS3) if p[-1] == VAC]


def _arc_distance(phases: np.ndarray) -> np.ndarray:
    """``2 sin(w/4)`` with ``w`` the width of the shortest arc holding all phases (last axis)."""
    th = np.sort(np.mod(phases, 2 * np.pi), axis=-1)
    wrap = th[..., :1] + 2 * np.pi
    gaps = np.diff(np.concatenate([th, wrap], axis=-1), axis=-1)
    width = 2 * np.pi - gaps.max(axis=-1)
    return 2 * np.sin(np.clip(width, 0.0, 2 * np.pi) / 4)


def distance(u: np.ndarray, v: np.ndarray, check: bool = True) -> float:
    """``min_phi ||u - e^{i phi} v||`` in operator norm.

    ``||u - e^{i phi} v|| = max_k |1 - e^{i(phi + theta_k)}|`` where
    ``e^{i theta_k}`` are the eigenvalues of ``u^dag v``, so the optimum
    centres the shortest arc containing all ``theta_k`` on zero.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"shapes {u.shape} and {v.shape} differ or are not square")
    if check:
        for name, m in (("u", u), ("v", v)):
            if unitarity_defect(m) > 1e-10:
                raise NotUnitary(f"{name} is not unitary")
    d = float(_arc_distance(np.angle(np.linalg.eigvals(u.conj().T @ v))))
    if log.isEnabledFor(logging.DEBUG):
        tr = np.trace(u.conj().T @ v)
        if abs(tr) < 1e-12:
            branches = [op_norm(u - s * v) for s in (1, -1)]
            log.debug("zero trace overlap; trace-phase branches +-: %s, optimal %.6g", branches, d)
        else:
            log.debug("trace-phase distance %.6g, optimal %.6g",
                      op_norm(u - np.exp(-1j * np.angle(tr)) * v), d)
    return d


def _batched_distance(mats: np.ndarray, target: np.ndarray) -> np.ndarray:
    w = np.einsum("ji,njk->nik", target.conj(), mats)
    return _arc_distance(np.angle(np.linalg.eigvals(w)))


@dataclass(frozen=True)
class Weave:
    moves: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        moves = tuple((int(g), int(p)) for g, p in self.moves)
        for m in moves:
            if m not in MOVES:
                raise InvalidWeave(f"move {m} is not one of {MOVES}")
        object.__setattr__(self, "moves", moves)

    def __len__(self):
        return len(self.moves)

    @property
    def canonical(self) -> bool:
        return all(b != (a[0], -a[1]) for a, b in zip(self.moves, self.moves[1:]))

    def word(self) -> BraidWord:
        letters = []
        for g, p in self.moves:
            letters.extend([g if p > 0 else -g] * abs(p))
        return BraidWord(tuple(letters), 3)

    def unitary(self) -> np.ndarray:
        return word_unitary(fibonacci_rep(3), self.word())


@dataclass(frozen=True)
class SearchBudget:
    max_moves: int = 12
    target_distance: float = 1e-10
    worker_partitions: int = 1

    def __post_init__(self):
        if self.max_moves < 1:
            raise InputError("max_moves must be >= 1")
        if not self.target_distance > 0:
            raise InputError("target_distance must be positive")
        if self.worker_partitions < 1:
            raise InputError("worker_partitions must be >= 1")


def sector_distance(u: np.ndarray, target: np.ndarray) -> float:
    """Cost of a three-anyon unitary: worst of the two total-charge sectors.

    Each sector carries its own free phase, since the relative phase between
    superselection sectors is unobservable.  A target given as 2x2 is
    taken to be the tau-sector block only.
    """
    u = np.asarray(u, dtype=complex)
    target = np.asarray(target, dtype=complex)
    ut = u[np.ix_(TAU_SECTOR, TAU_SECTOR)]
    if target.shape == (2, 2):
        return distance(ut, target)
    if target.shape != (3, 3):
        raise DimensionMismatch(f"target must be 2x2 or 3x3, got {target.shape}")
    t_tau = target[np.ix_(TAU_SECTOR, TAU_SECTOR)]
    t_vac = target[np.ix_(VAC_SECTOR, VAC_SECTOR)]
    u_vac = u[np.ix_(VAC_SECTOR, VAC_SECTOR)]
    return max(distance(ut, t_tau), distance(u_vac, t_vac))


@dataclass
class CompilationResult:
    weave: Weave
    distance: float
    target_name: str
    target: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)
    nodes_explored: int = 0
    exhausted: bool = False

    def to_json(self) -> dict:
        return {
            "target": self.target_name,
            "moves": [list(m) for m in self.weave.moves],
            "distance": self.distance,
            "nodes": self.nodes_explored,
            "budget_exhausted": self.exhausted,
            "target_matrix": _complex_to_json(self.target),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CompilationResult":
        """Rebuild a result; the weave matrix and distance are recomputed."""
        weave = Weave(tuple(tuple(m) for m in data["moves"]))
        target = _complex_from_json(data["target_matrix"])
        matrix = weave.unitary()
        return cls(
            weave,
            sector_distance(matrix, target),
            data["target"],
            target,
            matrix,
            int(data.get("nodes", 0)),
            bool(data.get("budget_exhausted", False)),
        )


def _complex_to_json(a: np.ndarray):
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _complex_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def named_target(name: str) -> np.ndarray:
    """Three-anyon target unitaries addressable by name."""
    rep = fibonacci_rep(3)
    if name == "identity":
        return np.eye(3, dtype=complex)
    if name == "B1^4":
        return word_unitary(rep, BraidWord((1, 1, 1, 1), 3))
    if name == "B1^2":
        return word_unitary(rep, BraidWord((1, 1), 3))
    raise InputError(f"unknown target {name!r}; known: identity, B1^2, B1^4")


def _move_mats(sector: list[int]) -> np.ndarray:
    return np.array([Weave((m,)).unitary()[np.ix_(sector, sector)] for m in MOVES])


class _Partition:
    """Frontier of the canonical-weave tree restricted to a set of first moves."""

    def __init__(self, first_moves: Sequence[int], tau_moves, vac_moves):
        self.tau_moves, self.vac_moves = tau_moves, vac_moves
        idx = np.asarray(first_moves, dtype=np.int64)
        self.codes = idx[:, None]
        self.tau = tau_moves[idx]
        self.vac = vac_moves[idx]

    def expand(self):
        last = self.codes[:, -1]
        inverse = last ^ 1  # MOVES[2g] and MOVES[2g+1] are mutual inverses
        codes, tau, vac = [], [], []
        for m in range(len(MOVES)):
            keep = inverse != m
            if not keep.any():
                continue
            codes.append(np.hstack([self.codes[keep], np.full((keep.sum(), 1), m)]))
            tau.append(np.einsum("ij,njk->nik", self.tau_moves[m], self.tau[keep]))
            vac.append(np.einsum("ij,njk->nik", self.vac_moves[m], self.vac[keep]))
        self.codes = np.vstack(codes)
        self.tau = np.concatenate(tau)
        self.vac = np.concatenate(vac)

    def best(self, t_tau, t_vac):
        d = _batched_distance(self.tau, t_tau)
        if t_vac is not None:
            d = np.maximum(d, _batched_distance(self.vac, t_vac))
        q = np.round(d, TIE_DECIMALS)
        # lexicographic order of move lists equals order of code rows
        order = np.lexsort(tuple(self.codes[:, ::-1].T) + (q,))
        i = order[0]
        return float(q[i]), tuple(int(c) for c in self.codes[i]), float(d[i]), len(self.codes)

    def step(self, t_tau, t_vac, expand):
        if expand:
            self.expand()
        return self.best(t_tau, t_vac)


def search_weave(
    target: np.ndarray,
    budget: SearchBudget = SearchBudget(),
    target_name: str = "custom",
) -> CompilationResult:
    """Iterative-deepening exhaustive search for the weave closest to ``target``.

    Depth ``L`` is searched completely before depth ``L+1``; the search stops
    after the first depth whose best distance reaches
    ``budget.target_distance``, or after ``budget.max_moves``.  Candidates
    are ranked by (distance rounded to 1e-12, length, move list), so the
    result does not depend on ``worker_partitions``.
    """
    target = np.asarray(target, dtype=complex)
    if target.shape == (3, 3):
        t_tau = target[np.ix_(TAU_SECTOR, TAU_SECTOR)]
        t_vac = target[np.ix_(VAC_SECTOR, VAC_SECTOR)]
    elif target.shape == (2, 2):
        t_tau, t_vac = target, None
    else:
        raise DimensionMismatch(f"target must be 2x2 or 3x3, got {target.shape}")
    if unitarity_defect(target) > 1e-10:
        raise NotUnitary("target is not unitary")

    empty_d = _batched_distance(np.eye(2, dtype=complex)[None], t_tau)[0]
    if t_vac is not None:
        empty_d = max(empty_d, _batched_distance(np.eye(1, dtype=complex)[None], t_vac)[0])
    best_key = (round(float(empty_d), TIE_DECIMALS), 0, ())
    best_d = float(empty_d)
    nodes = 1

    if best_d > budget.target_distance:
        tau_moves, vac_moves = _move_mats(TAU_SECTOR), _move_mats(VAC_SECTOR)
        groups = [list(range(p, len(MOVES), budget.worker_partitions))
                  for p in range(min(budget.worker_partitions, len(MOVES)))]
        parts = [_Partition(g, tau_moves, vac_moves) for g in groups]
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            for depth in range(1, budget.max_moves + 1):
                results = list(pool.map(lambda p: p.step(t_tau, t_vac, depth > 1), parts))
                for q, codes, d, n in results:
                    nodes += n
                    key = (q, depth, codes)
                    if key < best_key:
                        best_key, best_d = key, d
                if best_d <= budget.target_distance:
                    break

    weave = Weave(tuple(MOVES[c] for c in best_key[2]))
    matrix = weave.unitary()
    return CompilationResult(
        weave,
        best_d,
        target_name,
        target,
        matrix,
        nodes,
        exhausted=best_d > budget.target_distance,
    )


def controlled_gate(weave: Weave) -> np.ndarray:
    """Two-qubit gate from moving the control pair through the target along ``weave``.

    Basis ``|a b>`` = target ``a``, control ``b``, ordered
    ``|00>, |01>, |10>, |11>``.  A control pair of total charge 0 braids
    trivially; of charge tau it acts like a single anyon, so the target's
    tau-sector receives the weave's three-anyon unitary.
    """
    if not isinstance(weave, Weave):
        raise InvalidWeave("controlled_gate needs a Weave")
    block = weave.unitary()[np.ix_(TAU_SECTOR, TAU_SECTOR)]
    g = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        g[2 * a, 2 * a] = 1.0  # control b=0: identity on the target
        for a2 in range(2):
            g[2 * a2 + 1, 2 * a + 1] = block[a2, a]
    return g


def control_blocks(gate: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Target blocks of a controlled gate for control 0 and control 1."""
    return gate[0::2, 0::2], gate[1::2, 1::2]


def u4_reference() -> np.ndarray:
    """``(U_0tau)^4`` from the exact block matrices."""
    return np.linalg.matrix_power(block_matrices()["U0t"], 4)


class WeaveCache:
    """JSON file of compilation results keyed by (target hash, budget)."""

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)

    @staticmethod
    def key(target: np.ndarray, budget: SearchBudget) -> str:
        t = np.round(np.asarray(target, dtype=complex), 12)
        h = hashlib.sha256(t.tobytes()).hexdigest()[:16]
        return f"{h}:{budget.max_moves}:{budget.target_distance!r}"

    def _load(self) -> dict:
        if not os.path.exists(self.path):
            return {}
        with open(self.path, encoding="utf-8") as fh:
            return json.load(fh)

    def get(self, target, budget) -> Optional[CompilationResult]:
        entry = self._load().get(self.key(target, budget))
        return None if entry is None else CompilationResult.from_json(entry)

    def put(self, result: CompilationResult, budget: SearchBudget) -> None:
        data = self._load()
        data[self.key(result.target, budget)] = result.to_json()
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
        os.replace(tmp, self.path)


def compile_cached(target, budget: SearchBudget, target_name: str, cache: Optional[WeaveCache]):
    if cache is not None:
        hit = cache.get(target, budget)
        if hit is not None:
            return hit
    result = search_weave(target, budget, target_name)
    if cache is not None:
        cache.put(result, budget)
    return result
