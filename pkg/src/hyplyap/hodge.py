"""Intertwining diagram, local Hodge invariants and parabolic degrees.

The 2n reduced parameters are placed on the circle and browsed
counterclockwise; the walk gains 1 at every alpha and loses 1 at every
beta (value-after-step), and is shifted so its minimum is 0.  The walk
value at a marker is its level f.  Levels count the Hodge numbers
h_i = #{alpha : f = i} = #{beta : f = i-1};  the base point alpha* is
the first alpha after a zero of the walk, and representatives in
[alpha*, alpha* + 1) define gamma = sum(beta) - sum(alpha) in (0, n).

Parabolic degrees per level come from the closed form

    deg_par(p) = delta_p + [p = floor(gamma)+1] {gamma}
                 + sum_{f(alpha) = p} alpha + sum_{f(beta) = p-1} (1 - beta)

with delta_p counting betas of level p-1 among the first n - floor(gamma)
by appearance.  An independent recursion on the local invariants (remove
one alpha/beta pair, lift levels back) is provided as a cross-checking
oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from .errors import IntegerGamma, InvalidParams
from .params import HGParams

#: walls closer than this to an integer gamma are rejected, not perturbed
GAMMA_WALL_TOL = 1e-9


@dataclass(frozen=True)
class Marker:
    value: float        # reduced representative in [0, 1)
    kind: str           # "alpha" or "beta"
    index: int          # position in the input list
    f: int              # walk value after this marker, shifted to min 0
    appearance: int     # 1..n within its kind, browsing from alpha*


@dataclass(frozen=True)
class Diagram:
    """Intertwining diagram of one parameter set."""

    n: int
    entries: tuple[Marker, ...]          # circle order starting at alpha*
    alpha_star: float
    h: tuple[int, ...]                   # h_1 .. h_n
    gamma: float
    gamma_floor: int
    gamma_frac: float
    signature: tuple[int, int]           # (p, q) = (sum even h, sum odd h)

    def rep(self, value: float) -> float:
        """Representative of a reduced value in [alpha*, alpha* + 1)."""
        return value if value >= self.alpha_star else value + 1.0

    def f_alpha(self) -> tuple[int, ...]:
        """Levels of the alphas, in input order."""
        out = [0] * self.n
        for m in self.entries:
            if m.kind == "alpha":
                out[m.index] = m.f
        return tuple(out)

    def f_beta(self) -> tuple[int, ...]:
        out = [0] * self.n
        for m in self.entries:
            if m.kind == "beta":
                out[m.index] = m.f
        return tuple(out)


def analyze(params: HGParams) -> Diagram:
    """Build the diagram; raises IntegerGamma on a degenerate wall."""
    if not isinstance(params, HGParams):
        params = HGParams(*params)
    n = params.n
    markers = sorted(
        [(v, "alpha", i) for i, v in enumerate(params.alpha)]
        + [(v, "beta", i) for i, v in enumerate(params.beta)]
    )
    walk = []
    level = 0
    for v, kind, _ in markers:
        level += 1 if kind == "alpha" else -1
        walk.append(level)
    low = min(walk)
    walk = [w - low for w in walk]

    # alpha* = first alpha directly following a zero of the walk; the marker
    # after a zero is always an alpha, so scanning zeros suffices
    alpha_star = None
    star_pos = None
    m = 2 * n
    for i in range(m):
        if walk[i] == 0:
            v, kind, _ = markers[(i + 1) % m]
            if kind != "alpha":
                raise InvalidParams("walk inconsistency: marker after a zero is not an alpha")
            if alpha_star is None or v < alpha_star:
                alpha_star = v
                star_pos = (i + 1) % m
    if alpha_star is None:
        raise InvalidParams("walk never attains its minimum; inconsistent input")

    order = [(star_pos + k) % m for k in range(m)]
    seen = {"alpha": 0, "beta": 0}
    entries = []
    for pos in order:
        v, kind, idx = markers[pos]
        seen[kind] += 1
        entries.append(Marker(v, kind, idx, walk[pos], seen[kind]))

    rep = lambda v: v if v >= alpha_star else v + 1.0
    gamma = sum(rep(b) for b in params.beta) - sum(rep(a) for a in params.alpha)
    if abs(gamma - round(gamma)) < GAMMA_WALL_TOL:
        raise IntegerGamma(f"gamma = {gamma!r} sits on an integer wall")
    gamma_floor = int(gamma)
    gamma_frac = gamma - gamma_floor
    if not 0 < gamma < n:
        raise InvalidParams(f"gamma = {gamma!r} outside (0, {n})")

    h = [0] * n
    for e in entries:
        if e.kind == "alpha":
            h[e.f - 1] += 1
    # double count: every level's alphas are matched by betas one level down
    h_beta = [0] * n
    for e in entries:
        if e.kind == "beta":
            h_beta[e.f] += 1
    if h != h_beta:
        raise InvalidParams(f"double-count identity failed: {h} vs {h_beta}")

    p = sum(h[i] for i in range(n) if (i + 1) % 2 == 0)
    q = sum(h[i] for i in range(n) if (i + 1) % 2 == 1)
    return Diagram(n, tuple(entries), alpha_star, tuple(h),
                   gamma, gamma_floor, gamma_frac, (p, q))


@dataclass(frozen=True)
class LocalInvariants:
    """Nonzero local Hodge invariants nu at the three singular points.

    `entries` lists (singularity, jump value in [0,1), level) triples
    with nu = 1; `levels` keys the same data by marker identity,
    ("0", m) for alpha_m, ("inf", m) for beta_m, ("1",) for the single
    distinguished jump {gamma}, which makes exact comparison easy.
    """

    entries: tuple[tuple[str, float, int], ...]
    levels: dict

    def level_totals(self, singularity: str, n: int) -> tuple[int, ...]:
        out = [0] * n
        for sing, _, level in self.entries:
            if sing == singularity:
                out[level - 1] += 1
        return tuple(out)


def local_invariants(diagram: Diagram) -> LocalInvariants:
    """Closed-form invariants: level f at 0, f+1 at infinity, floor+1 at 1."""
    entries = []
    levels = {}
    for m in diagram.entries:
        if m.kind == "alpha":
            entries.append(("0", m.value, m.f))
            levels[("0", m.index)] = m.f
        else:
            entries.append(("inf", (1.0 - m.value) % 1.0, m.f + 1))
            levels[("inf", m.index)] = m.f + 1
    entries.append(("1", diagram.gamma_frac, diagram.gamma_floor + 1))
    levels[("1",)] = diagram.gamma_floor + 1
    return LocalInvariants(tuple(entries), levels)


@dataclass(frozen=True)
class DegreeReport:
    """Per-level Deligne degrees delta_p <= 0 and parabolic degrees."""

    delta: tuple[int, ...]
    deg_par: tuple[float, ...]

    def total(self) -> float:
        return sum(self.deg_par)


def parabolic_degrees(diagram: Diagram) -> DegreeReport:
    n = diagram.n
    cutoff = n - diagram.gamma_floor
    delta = []
    deg = []
    for p in range(1, n + 1):
        d = -sum(
            1 for m in diagram.entries
            if m.kind == "beta" and m.f == p - 1 and m.appearance <= cutoff
        )
        value = float(d)
        if p == diagram.gamma_floor + 1:
            value += diagram.gamma_frac
        for m in diagram.entries:
            if m.kind == "alpha" and m.f == p:
                value += diagram.rep(m.value)
            elif m.kind == "beta" and m.f == p - 1:
                value += 1.0 - diagram.rep(m.value)
        delta.append(d)
        deg.append(value)
    return DegreeReport(tuple(delta), tuple(deg))


def signature_zeros(diagram: Diagram) -> int:
    """Lower bound |p - q| on the number of vanishing exponents."""
    p, q = diagram.signature
    return abs(p - q)


# -- middle-convolution recursion, used as an independent oracle -----------

def _adjacent_pairs(alphas, betas):
    """(k, j) pairs where alpha_k is directly followed by beta_j on the circle."""
    markers = sorted(
        [(v, "alpha", i) for i, (v, _) in enumerate(alphas)]
        + [(v, "beta", i) for i, (v, _) in enumerate(betas)]
    )
    m = len(markers)
    pairs = []
    for i in range(m):
        v, kind, idx = markers[i]
        v2, kind2, idx2 = markers[(i + 1) % m]
        if kind == "alpha" and kind2 == "beta":
            pairs.append((idx, idx2))
    return pairs


def _oracle_levels(alphas, betas):
    """Levels keyed like LocalInvariants.levels, computed recursively.

    alphas/betas are lists of (value, key) with the original marker keys.
    Each step removes one (alpha_k, beta_j) pair, recurses, and lifts the
    remaining levels: +1 for markers strictly inside the arc from alpha_k
    counterclockwise to beta_j, unchanged otherwise; the level of the
    distinguished jump at 1 gains the carry of {gamma} across the arc
    length.  A removal determines the levels only up to one global
    integer (the filtration may shift when the walk minimum moves); an
    adjacent pair never moves the minimum, so the first branch is exact,
    and the second branch -- needed to cover the removed pair -- is
    aligned to it through the shared jump at the singularity 1.
    """
    n = len(alphas)
    if n == 1:
        return {alphas[0][1]: 1, betas[0][1]: 1, "gamma": 1}

    adj = _adjacent_pairs(alphas, betas)
    if not adj:
        raise InvalidParams("no adjacent alpha-beta pair; inconsistent marker set")
    k1, j1 = adj[0]
    levels = _lift_removed(alphas, betas, k1, j1)
    # second removal with both indices different covers alpha_k1 and beta_j1
    k2 = next(k for k in range(n) if k != k1)
    j2 = next(j for j in range(n) if j != j1)
    branch = _lift_removed(alphas, betas, k2, j2)
    shift = levels["gamma"] - branch["gamma"]
    for key, lvl in branch.items():
        aligned = lvl + shift
        if key in levels:
            if levels[key] != aligned:
                raise InvalidParams(
                    f"recursion branches disagree at {key}: {levels[key]} vs {aligned}"
                )
        else:
            levels[key] = aligned
    if min(lvl for key, lvl in levels.items() if key != "gamma" and key[0] == "0") != 1:
        raise InvalidParams("oracle anchor failed: minimal alpha level is not 1")
    return levels


def _lift_removed(alphas, betas, k, j):
    ak = alphas[k][0]
    bj = betas[j][0]
    d = (bj - ak) % 1.0
    sub = _oracle_levels(
        [a for i, a in enumerate(alphas) if i != k],
        [b for i, b in enumerate(betas) if i != j],
    )
    out = {}
    for v, key in alphas[:k] + alphas[k + 1:] + betas[:j] + betas[j + 1:]:
        arc = (v - ak) % 1.0
        out[key] = sub[key] + (1 if 0.0 < arc < d else 0)
    g_frac = (sum(v for v, _ in betas) - sum(v for v, _ in alphas)) % 1.0
    out["gamma"] = sub["gamma"] + (1 if g_frac < d else 0)
    return out


def ds_recursion_oracle(params: HGParams) -> LocalInvariants:
    """Recompute the local invariants by pair-removal recursion.

    Independent of the diagram walk; must agree exactly with
    local_invariants(analyze(params)) on every valid input.
    """
    if not isinstance(params, HGParams):
        params = HGParams(*params)
    alphas = [(v, ("0", i)) for i, v in enumerate(params.alpha)]
    betas = [(v, ("inf", i)) for i, v in enumerate(params.beta)]
    raw = _oracle_levels(alphas, betas)
    levels = {}
    entries = []
    for i, v in enumerate(params.alpha):
        lvl = raw[("0", i)]
        levels[("0", i)] = lvl
        entries.append(("0", v, lvl))
    for i, v in enumerate(params.beta):
        lvl = raw[("inf", i)]
        levels[("inf", i)] = lvl
        entries.append(("inf", (1.0 - v) % 1.0, lvl))
    g_frac = (sum(params.beta) - sum(params.alpha)) % 1.0
    levels[("1",)] = raw["gamma"]
    entries.append(("1", g_frac, raw["gamma"]))
    return LocalInvariants(tuple(entries), levels)
