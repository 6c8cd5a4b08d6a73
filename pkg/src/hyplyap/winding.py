"""Cutting sequences to cusp monodromies via a coset automaton.

The thrice-punctured sphere is H / Gamma(2); modulo +-Id, Gamma(2) is
free on

    x = [[1, 2], [0, 1]]   (stabilizes the cusp at infinity)
    y = [[1, 0], [2, 1]]   (stabilizes the cusp at 0)

while the cutting sequence of a geodesic is written in the triangle-
crossing letters L = [[1,0],[1,1]] and R = [[1,1],[0,1]].  We carry the
current right coset of Gamma(2) in the modular group through a fixed
6-element transversal; each letter step factors exactly as

    c . X = gamma . c'     with gamma in Gamma(2) up to sign,

so concatenating the emitted gammas reconstructs the full letter product
as exact integer matrices up to overall sign.  A maximal run of 2k+r
equal letters collapses to (c X^2 c^{-1})^k plus at most one table step,
so a run of any length costs O(log k) matrix work.

The triangle-label view of the same bookkeeping (which puncture sits at
the pivot corner while the geodesic fans around it) is kept as an
independent diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import TableInconsistent
from .monodromy import MonodromySet

IntMat = tuple[tuple[int, int], tuple[int, int]]
Gamma2Word = tuple[tuple[str, int], ...]

L_MAT: IntMat = ((1, 0), (1, 1))
R_MAT: IntMat = ((1, 1), (0, 1))
GEN_X: IntMat = ((1, 2), (0, 1))
GEN_Y: IntMat = ((1, 0), (2, 1))

LETTERS = ("L", "R")
_LETTER_MAT = {"L": L_MAT, "R": R_MAT}

#: transversal words for the 6 right cosets of Gamma(2) in SL(2, Z)
TRANSVERSAL_WORDS = ("", "L", "R", "LR", "RL", "LRL")

#: canonical initial coset: the standard triangle pair, geodesic crossing (0, infinity)
COSET_START = 0


# -- exact 2x2 integer arithmetic (Python ints, no overflow) --------------

def mat_mul(a: IntMat, b: IntMat) -> IntMat:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def mat_inv(a: IntMat) -> IntMat:
    """Inverse in SL(2, Z) (det must be 1)."""
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if det != 1:
        raise ValueError(f"not in SL(2, Z): det = {det}")
    return ((a[1][1], -a[0][1]), (-a[1][0], a[0][0]))


def mat_neg(a: IntMat) -> IntMat:
    return ((-a[0][0], -a[0][1]), (-a[1][0], -a[1][1]))


def mat_mod2(a: IntMat) -> IntMat:
    return ((a[0][0] & 1, a[0][1] & 1), (a[1][0] & 1, a[1][1] & 1))


def _letters_to_mat(word: str) -> IntMat:
    m: IntMat = ((1, 0), (0, 1))
    for ch in word:
        m = mat_mul(m, _LETTER_MAT[ch])
    return m


TRANSVERSAL: tuple[IntMat, ...] = tuple(_letters_to_mat(w) for w in TRANSVERSAL_WORDS)
_RESIDUE_TO_COSET = {mat_mod2(m): i for i, m in enumerate(TRANSVERSAL)}
assert len(_RESIDUE_TO_COSET) == 6, "transversal residues must fill SL(2, F2)"


# -- reduced words in the free group Gamma(2)/{+-Id} ----------------------

def word_reduce(pairs) -> Gamma2Word:
    out: list[list] = []
    for gen, exp in pairs:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            out[-1][1] += exp
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([gen, exp])
    return tuple((g, e) for g, e in out)


def word_mul(a: Gamma2Word, b: Gamma2Word) -> Gamma2Word:
    return word_reduce(list(a) + list(b))


def word_inv(a: Gamma2Word) -> Gamma2Word:
    return tuple((g, -e) for g, e in reversed(a))


def word_to_matrix(word: Gamma2Word) -> IntMat:
    """Exact integer lift; x^k = [[1,2k],[0,1]], y^k = [[1,0],[2k,1]]."""
    m: IntMat = ((1, 0), (0, 1))
    for gen, exp in word:
        step: IntMat = ((1, 2 * exp), (0, 1)) if gen == "x" else ((1, 0), (2 * exp, 1))
        m = mat_mul(m, step)
    return m


def _nearest_div(p: int, q: int) -> int:
    """Nearest integer to p/q; our inputs never land on a tie."""
    if q < 0:
        p, q = -p, -q
    fl = p // q
    return fl + (1 if 2 * (p - fl * q) > q else 0)


def word_from_matrix(g: IntMat) -> Gamma2Word:
    """Factor g in +-Gamma(2) into the unique reduced word in x, y.

    Peels generator powers off the left by the Euclidean algorithm on
    the first column; parity (diagonal odd, off-diagonal even) rules out
    ties in the nearest-integer division, so |a| + |c| strictly drops.
    """
    (a, b), (c, d) = g
    if (a & 1, b & 1, c & 1, d & 1) != (1, 0, 0, 1):
        raise TableInconsistent(f"matrix not congruent to Id mod 2: {g}")
    pairs: list[tuple[str, int]] = []
    while c != 0:
        if abs(a) > abs(c):
            k = _nearest_div(a, 2 * c)
            pairs.append(("x", k))
            a, b = a - 2 * k * c, b - 2 * k * d
        else:
            k = _nearest_div(c, 2 * a)
            pairs.append(("y", k))
            c, d = c - 2 * k * a, d - 2 * k * b
    # now g' = +-[[1, b'],[0, 1]] with a = d = +-1
    k = (a * b) // 2
    if k:
        pairs.append(("x", k))
    word = word_reduce(pairs)
    lift = word_to_matrix(word)
    if lift != g and lift != mat_neg(g):
        raise TableInconsistent(f"word {word} does not lift to +-{g}")
    return word


# -- the 12-entry step table ----------------------------------------------

class StepEntry(NamedTuple):
    word: Gamma2Word     # gamma with c . X = gamma . c' up to sign
    next_coset: int      # index of c' in the transversal


def build_step_table() -> dict[tuple[int, str], StepEntry]:
    """Factor c . X = gamma . c' offline for all 12 (coset, letter) pairs.

    Every entry is verified by exact integer multiplication; a failure
    signals a wrong transversal and raises TableInconsistent.
    """
    table: dict[tuple[int, str], StepEntry] = {}
    for ci, c in enumerate(TRANSVERSAL):
        for letter in LETTERS:
            m = mat_mul(c, _LETTER_MAT[letter])
            ni = _RESIDUE_TO_COSET[mat_mod2(m)]
            gamma = mat_mul(m, mat_inv(TRANSVERSAL[ni]))
            word = word_from_matrix(gamma)
            check = mat_mul(word_to_matrix(word), TRANSVERSAL[ni])
            if check != m and check != mat_neg(m):
                raise TableInconsistent(f"step ({ci}, {letter}) fails exact check")
            table[(ci, letter)] = StepEntry(word, ni)
    return table


STEP_TABLE = build_step_table()


def step(coset: int, letter: str) -> tuple[Gamma2Word, int]:
    """One letter of the cutting sequence: emitted word and next coset."""
    entry = STEP_TABLE[(coset, letter)]
    return entry.word, entry.next_coset


def run_coset(coset: int, letter: str, run_length: int) -> int:
    """Coset after a run; even runs return to where they started."""
    if run_length % 2 == 0:
        return coset
    return STEP_TABLE[(coset, letter)].next_coset


# -- cusp bookkeeping -------------------------------------------------------

#: boundary fixed points of L^2 (the cusp 0) and R^2 (the cusp infinity)
_PIVOT_VECTOR = {"L": (0, 1), "R": (1, 0)}


def _cusp_class(p: int, q: int) -> str:
    """Mod-2 class of a primitive vector: A = infinity, B = 0, C = 1."""
    if q % 2 == 0:
        return "A"
    if p % 2 == 0:
        return "B"
    return "C"


def run_cusp(coset: int, letter: str) -> str:
    """Cusp a maximal run of `letter` letters winds around, from `coset`."""
    v = _PIVOT_VECTOR[letter]
    c = TRANSVERSAL[coset]
    return _cusp_class(c[0][0] * v[0] + c[0][1] * v[1],
                       c[1][0] * v[0] + c[1][1] * v[1])


class WindingEvent(NamedTuple):
    cusp: str                       # "A" (infinity), "B" (0) or "C" (1)
    turns: int                      # full loops; + counterclockwise
    residual_letter: Optional[str]  # set when the run length is odd


#: conjugates c X^2 c^{-1} generating the even part of each run
_EVEN_WORDS = {
    (ci, letter): word_from_matrix(
        mat_mul(mat_mul(TRANSVERSAL[ci], mat_mul(_LETTER_MAT[letter], _LETTER_MAT[letter])),
                mat_inv(TRANSVERSAL[ci]))
    )
    for ci in range(6)
    for letter in LETTERS
}

_POWER_CACHE_SIZE = 65


def _word_letters(word: Gamma2Word):
    out = []
    for gen, exp in word:
        step = 1 if exp > 0 else -1
        out.extend([(gen, step)] * abs(exp))
    return out


def _cyclic_split(word: Gamma2Word):
    """Split a reduced word as w . core . w^{-1} with core cyclically reduced."""
    letters = _word_letters(word)
    head = []
    while len(letters) >= 2 and letters[0][0] == letters[-1][0] \
            and letters[0][1] == -letters[-1][1]:
        head.append(letters[0])
        letters = letters[1:-1]
    return word_reduce(head), word_reduce(letters)


class _SpectralPower:
    """Arbitrary powers of a quasi-unipotent matrix, numerically stable.

    Cusp monodromies have unimodular eigenvalues and bounded Jordan
    blocks, so G^k = sum_i lam_i^k sum_j C(k,j) lam_i^{-j} N_i^j P_i with
    spectral projectors P_i and nilpotent parts N_i.  Eigenvalues are
    clustered (a defective block perturbs them symmetrically, so the
    cluster mean is accurate) and normalized to modulus one.  Repeated
    squaring is useless here: errors compound catastrophically on
    non-normal matrices long before k gets large.
    """

    def __init__(self, g: np.ndarray, cluster_tol: float = 1e-3):
        n = g.shape[0]
        eigs = np.linalg.eigvals(g)
        clusters: list[list[complex]] = []
        for lam in eigs:
            for cl in clusters:
                if abs(lam - cl[0]) < cluster_tol * max(1.0, abs(cl[0])):
                    cl.append(lam)
                    break
            else:
                clusters.append([lam])
        self.lams = [complex(np.mean(cl)) for cl in clusters]
        self.lams = [lam / abs(lam) for lam in self.lams]
        mults = [len(cl) for cl in clusters]
        ident = np.eye(n, dtype=complex)
        self.terms = []   # (lam, [P, N P, N^2 P / ..., highest j])
        for i, (lam, m) in enumerate(zip(self.lams, mults)):
            # f_i(G): congruent to 1 mod (t-lam_i)^{m_i}, 0 mod the others
            proj = ident
            for j, (lam2, m2) in enumerate(zip(self.lams, mults)):
                if j == i:
                    continue
                block = (g - lam2 * ident) / (lam - lam2)
                for _ in range(m2):
                    proj = proj @ block
            # Newton correction: square-and-correct until proj is idempotent
            for _ in range(40):
                err = proj @ proj - proj
                if np.abs(err).max() < 1e-14:
                    break
                proj = 3.0 * (proj @ proj) - 2.0 * (proj @ proj @ proj)
            nil = (g - lam * ident) @ proj
            powers = [proj]
            for _ in range(m - 1):
                powers.append(nil @ powers[-1])
            self.terms.append((lam, powers))

    def power(self, k: int) -> np.ndarray:
        out = np.zeros_like(self.terms[0][1][0])
        for lam, powers in self.terms:
            phase = lam ** k
            coeff = 1.0
            for j, mat in enumerate(powers):
                if j > 0:
                    coeff = coeff * (k - j + 1) / j
                out = out + (phase * coeff * lam ** (-j)) * mat
        return out


class Representation:
    """Matrices of the cusp loops, with the run caches used by the hot loop.

    rho(x) = Minf^{-1} = M0 M1 and rho(y) = M0; the cusp-1 loop x y^{-1}
    then lands in the conjugacy class of M1, so all three cusp loops map
    into the correct classes.  Gamma(2)/{+-Id} is free on x and y, hence
    any assignment extends to a homomorphism and overall signs need no
    bookkeeping.
    """

    def __init__(self, ms: MonodromySet):
        self.n = ms.n
        rho_x = np.asarray(ms.m0 @ ms.m1, dtype=complex)
        rho_y = np.asarray(ms.m0, dtype=complex)
        self._gen = {
            ("x", 1): rho_x,
            ("x", -1): np.asarray(ms.minf, dtype=complex),
            ("y", 1): rho_y,
            ("y", -1): np.linalg.inv(rho_y),
        }
        self._even_base = {key: self.word_matrix(word) for key, word in _EVEN_WORDS.items()}
        self._even_pows = {}
        for key, base in self._even_base.items():
            pows = [np.eye(self.n, dtype=complex)]
            for _ in range(_POWER_CACHE_SIZE - 1):
                pows.append(pows[-1] @ base)
            self._even_pows[key] = pows
        self._odd = {
            key: (self.word_matrix(entry.word), entry.next_coset)
            for key, entry in STEP_TABLE.items()
        }
        self._long = {}

    def generator(self, gen: str, power: int = 1) -> np.ndarray:
        return self._gen[(gen, 1 if power >= 0 else -1)]

    def word_matrix(self, word: Gamma2Word) -> np.ndarray:
        """Evaluate the homomorphism on a reduced word."""
        m = np.eye(self.n, dtype=complex)
        for gen, exp in word:
            base = self._gen[(gen, 1 if exp > 0 else -1)]
            m = m @ np.linalg.matrix_power(base, abs(exp))
        return m

    def even_power(self, coset: int, letter: str, k: int) -> np.ndarray:
        """(c X^2 c^{-1})^k; spectral powering beyond the dense cache."""
        pows = self._even_pows[(coset, letter)]
        if k < _POWER_CACHE_SIZE:
            return pows[k]
        key = (coset, letter)
        if key not in self._long:
            head, core = _cyclic_split(_EVEN_WORDS[key])
            w = self.word_matrix(head)
            self._long[key] = (w, np.linalg.inv(w), _SpectralPower(self.word_matrix(core)))
        w, w_inv, spectral = self._long[key]
        return w @ spectral.power(k) @ w_inv

    def run_matrix(self, coset: int, letter: str, run_length: int) -> tuple[np.ndarray, int]:
        """Hot-loop variant of run_to_monodromy without the winding event."""
        k, odd = divmod(run_length, 2)
        mat = self.even_power(coset, letter, k)
        if odd:
            odd_mat, coset = self._odd[(coset, letter)]
            mat = mat @ odd_mat
        return mat, coset


def representation(ms: MonodromySet) -> Representation:
    """The homomorphism rho sending x to Minf^{-1} and y to M0."""
    return Representation(ms)


def run_to_monodromy(coset: int, letter: str, run_length: int,
                     rho: Representation) -> tuple[np.ndarray, WindingEvent, int]:
    """Monodromy of a maximal run of `run_length` equal letters.

    The even part is a binary power of rho(c X^2 c^{-1}); an odd run
    appends one table step.  Turn count is run_length // 2, positive for
    left runs (counterclockwise), negative for right runs.
    """
    if run_length < 1:
        raise ValueError(f"run length must be >= 1, got {run_length}")
    k, odd = divmod(run_length, 2)
    mat, next_coset = rho.run_matrix(coset, letter, run_length)
    turns = k if letter == "L" else -k
    event = WindingEvent(run_cusp(coset, letter), turns, letter if odd else None)
    return mat, event, next_coset


# -- triangle diagnostic ----------------------------------------------------

class TriangleState(NamedTuple):
    """Corner labels (left, right, opposite) and the orientation color."""
    left: str
    right: str
    opposite: str
    color: str      # "white" or "blue", flips on every crossing


def triangle_step(state: TriangleState, letter: str) -> TriangleState:
    """Crossing rule: the pivot corner of the run keeps its label."""
    color = "blue" if state.color == "white" else "white"
    if letter == "L":
        return TriangleState(state.left, state.opposite, state.right, color)
    return TriangleState(state.opposite, state.right, state.left, color)


def triangle_state_for(coset: int, color: str = "white") -> TriangleState:
    """Triangle labels matched to a coset: classes of c(0,1), c(1,0), c(1,1)."""
    c = TRANSVERSAL[coset]
    lab = lambda v: _cusp_class(c[0][0] * v[0] + c[0][1] * v[1],
                                c[1][0] * v[0] + c[1][1] * v[1])
    return TriangleState(lab((0, 1)), lab((1, 0)), lab((1, 1)), color)
