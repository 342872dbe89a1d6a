"""Braid words, representations and the relation checker.

Composition convention: the leftmost letter of a word is applied first.
For a word ``[a, b, c]`` the represented operator is ``R(c) @ R(b) @ R(a)``,
so the earliest exchange acts first on a state vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, MalformedToken, NotUnitary

UNITARY_TOL = 1e-12


def op_norm(a: np.ndarray) -> float:
    """Operator (spectral) norm: the largest singular value."""
    return float(np.linalg.norm(a, 2))


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u)
    return op_norm(u.conj().T @ u - np.eye(u.shape[0]))


@dataclass(frozen=True)
class BraidWord:
    """Element of the braid group on ``n_strands`` strands.

    A positive letter ``k`` is the counterclockwise exchange ``B_k`` of
    strands ``k`` and ``k+1``; ``-k`` is its inverse.
    """

    letters: tuple[int, ...]
    n_strands: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(k) for k in self.letters))
        if self.n_strands < 1:
            raise IndexOutOfRange(f"n_strands must be positive, got {self.n_strands}")
        for k in self.letters:
            if k == 0:
                raise MalformedToken("letter 0 is not a generator")
            if abs(k) > self.n_strands - 1:
                raise IndexOutOfRange(
                    f"generator {k} out of range for {self.n_strands} strands"
                )

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(str(k) for k in self.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(tuple(-k for k in reversed(self.letters)), self.n_strands)

    def permutation(self) -> list[int]:
        """Final position (1-indexed) of the strand that started at each position.

        ``perm[i-1]`` is where strand ``i`` ends up.
        """
        pos = list(range(1, self.n_strands + 1))
        at = list(range(1, self.n_strands + 1))  # at[p-1] = strand sitting at p
        for k in self.letters:
            j = abs(k)
            at[j - 1], at[j] = at[j], at[j - 1]
        for p, strand in enumerate(at, start=1):
            pos[strand - 1] = p
        return pos


def parse_word(text: str, n_strands: int) -> BraidWord:
    """Parse whitespace-separated signed integers, e.g. ``"1 -2 1"``."""
    letters = []
    for tok in text.split():
        try:
            k = int(tok)
        except ValueError:
            raise MalformedToken(f"not an integer: {tok!r}") from None
        if k == 0:
            raise MalformedToken("letter 0 is not a generator")
        letters.append(k)
    return BraidWord(tuple(letters), n_strands)


def free_reduce(w: BraidWord) -> BraidWord:
    """Cancel adjacent ``k, -k`` pairs (free reduction only, no Artin moves)."""
    stack: list[int] = []
    for k in w.letters:
        if stack and stack[-1] == -k:
            stack.pop()
        else:
            stack.append(k)
    return BraidWord(tuple(stack), w.n_strands)


@dataclass(frozen=True)
class Representation:
    """Unitary representation of the braid group on ``n_strands`` strands.

    ``generators[j-1]`` is the matrix of ``B_j``.
    """

    n_strands: int
    dim: int
    generators: tuple[np.ndarray, ...]
    name: str = ""
    _inverses: tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        if len(gens) != max(self.n_strands - 1, 0):
            raise DimensionMismatch(
                f"{self.n_strands} strands need {self.n_strands - 1} generators, got {len(gens)}"
            )
        for j, g in enumerate(gens, start=1):
            if g.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"generator {j} has shape {g.shape}, expected {self.dim}")
            if unitarity_defect(g) > UNITARY_TOL:
                raise NotUnitary(f"generator {j} is not unitary")
            g.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_inverses", tuple(g.conj().T for g in gens))

    def generator(self, j: int) -> np.ndarray:
        return self.generators[j - 1]

    def letter(self, k: int) -> np.ndarray:
        return self.generators[k - 1] if k > 0 else self._inverses[-k - 1]


def word_unitary(rep: Representation, w: BraidWord) -> np.ndarray:
    if w.n_strands != rep.n_strands:
        raise DimensionMismatch(
            f"word on {w.n_strands} strands, representation on {rep.n_strands}"
        )
    u = np.eye(rep.dim, dtype=complex)
    for k in w.letters:
        u = rep.letter(k) @ u
    return u


@dataclass(frozen=True)
class RelationReport:
    max_commutation_defect: float
    max_yang_baxter_defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_commutation_defect <= self.tol and self.max_yang_baxter_defect <= self.tol

    def to_dict(self) -> dict:
        return {
            "max_commutation_defect": self.max_commutation_defect,
            "max_yang_baxter_defect": self.max_yang_baxter_defect,
            "tol": self.tol,
            "pass": self.passed,
        }


def check_relations(rep: Representation, tol: float = 1e-10) -> RelationReport:
    """Largest violation of far commutation and of the Yang-Baxter relation."""
    g = rep.generators
    n = len(g)
    comm = 0.0
    for i in range(n):
        for j in range(i + 2, n):
            comm = max(comm, op_norm(g[i] @ g[j] - g[j] @ g[i]))
    yb = 0.0
    for j in range(n - 1):
        a, b = g[j], g[j + 1]
        yb = max(yb, op_norm(a @ b @ a - b @ a @ b))
    return RelationReport(comm, yb, tol)


def abelian_rep(theta: float, n_strands: int) -> Representation:
    """One-dimensional representation: every exchange is the phase ``e^{i theta}``."""
    phase = np.array([[np.exp(1j * theta)]])
    return Representation(
        n_strands, 1, tuple(phase for _ in range(n_strands - 1)), name=f"abelian(theta={theta:g})"
    )


def random_word(rng: np.random.Generator, n_strands: int, length: int) -> BraidWord:
    gens = rng.integers(1, n_strands, size=length)
    signs = rng.choice([-1, 1], size=length)
    return BraidWord(tuple(int(s * g) for s, g in zip(signs, gens)), n_strands)


def as_word(letters: Sequence[int] | BraidWord, n_strands: int) -> BraidWord:
    if isinstance(letters, BraidWord):
        return letters
    return BraidWord(tuple(letters), n_strands)
