"""Scale schedules, error-cluster hierarchies, and the analytic threshold.

The machinery revolves around two monotone sequences b_k (buffer widths) and
d_k (cluster diameters):

    union-find family:  b_k = beta * lam^((k+1) ln(k+1)) + 1,
                        d_k = gamma * lam^(k ln k) - 1
    greedy family:      b_k = beta * lam^(k+1) + 1,
                        d_k = gamma * lam^k - 1

(natural logarithms throughout).  Level-k clustered sets are defined by
repeated removal: N_0 is the error edge set, and N_k removes from N_{k-1}
every edge lying in a (d_k, b_k)-cluster, i.e. a subset of diameter at most
d_k separated from the rest by line-graph distance more than b_k.  The
companion isolated sets remove edges whose (d_k/2, b_k + d_k/2) annulus is
empty.  Clustered sets are always contained in isolated sets, which is what
lets the minimal-witness counting argument bound the probability of reaching
level k doubly exponentially.

All schedule arithmetic runs in mpmath extended precision, since b_k and d_k
overflow a double around k = 40 at the validated parameter point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp

from .detector_graph import DetectorGraph

_DPS = 60


@dataclass(frozen=True)
class ScaleSchedule:
    family: str  # "uf" | "greedy"
    beta: float
    gamma: float
    lam: float

    def __post_init__(self) -> None:
        if self.family not in ("uf", "greedy"):
            raise ValueError(f"unknown schedule family {self.family!r}")
        if min(self.beta, self.gamma) <= 0 or self.lam <= 1:
            raise ValueError("require beta, gamma > 0 and lam > 1")

    def exponent(self, k: int) -> mp.mpf:
        """The scale exponent f(k): k ln k for the UF family, k for greedy."""
        with mp.workdps(_DPS):
            if self.family == "uf":
                return mp.mpf(k) * mp.log(k) if k > 1 else mp.mpf(0)
            return mp.mpf(k)

    def b(self, k: int) -> mp.mpf:
        if k < 1:
            raise ValueError("k must be >= 1")
        with mp.workdps(_DPS):
            return mp.mpf(self.beta) * mp.power(self.lam, self.exponent(k + 1)) + 1

    def d(self, k: int) -> mp.mpf:
        if k < 1:
            raise ValueError("k must be >= 1")
        with mp.workdps(_DPS):
            return mp.mpf(self.gamma) * mp.power(self.lam, self.exponent(k)) - 1


VALIDATED_UF = ScaleSchedule("uf", beta=1.2, gamma=2.8, lam=107.0)


# -- f_k recursion ---------------------------------------------------------

_fk_cache: dict[tuple, list[mp.mpf]] = {}


def f_k(schedule: ScaleSchedule, k: int) -> mp.mpf:
    """Free-path fraction floor used by the cluster stopping guarantee.

    f_1 = 1 and each later level subtracts the worst-case fraction of a
    connecting path that lower-level grown clusters can occupy.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    key = (schedule.family, schedule.beta, schedule.gamma, schedule.lam)
    seq = _fk_cache.setdefault(key, [mp.mpf(1)])  # seq[i] = f_{i+1}
    with mp.workdps(_DPS):
        while len(seq) < k:
            kk = len(seq) + 1
            total = mp.mpf(0)
            for j in range(1, kk):
                fj, dj, bj = seq[j - 1], schedule.d(j), schedule.b(j)
                total += ((fj + 1) * (dj + 1)) / (
                    (fj + 1) * (dj + mp.mpf(0.5)) + fj * (bj - 1)
                )
            seq.append(1 - total)
    return seq[k - 1]


# -- constants --------------------------------------------------------------


def series_constant(family: str = "uf", rel_tol: float = 1e-12) -> float:
    """c with sum_{j<k} f(k-j+1) 2^j = c 2^k + o(2^k).

    For f(k) = k ln k this is sum_{n>=2} n ln n / 2^(n-1); for f(k) = k it is
    exactly 3.
    """
    if family == "greedy":
        return 3.0
    with mp.workdps(_DPS):
        total = mp.mpf(0)
        n = 2
        while True:
            term = mp.mpf(n) * mp.log(n) / mp.power(2, n - 1)
            total += term
            if term < total * rel_tol and n > 10:
                break
            n += 1
        return float(total)


def zeta_direct(s: float, rel_tol: float = 1e-10) -> float:
    """Riemann zeta by direct summation plus the integral-remainder estimate.

    The tail past N is replaced by its Euler-Maclaurin estimate
    N^(1-s)/(s-1) + N^(-s)/2 + s N^(-s-1)/12, whose own error falls like
    N^(-s-3); N grows until that error is below the tolerance.
    """
    if s <= 1:
        raise ValueError("zeta sum diverges for s <= 1")
    total = 0.0
    n = 1
    while True:
        total += float(n) ** (-s)
        err = s * (s + 1) * (s + 2) * float(n) ** (-s - 3) / 720.0
        if err < rel_tol * total and n >= 10:
            break
        n += 1
    tail = (
        float(n) ** (1 - s) / (s - 1)
        - float(n) ** (-s) / 2.0
        + s * float(n) ** (-s - 1) / 12.0
    )
    return total + tail


# -- constraint checking ------------------------------------------------------


def check_constraints(schedule: ScaleSchedule, k_max: int = 50) -> list[tuple[str, bool]]:
    """Evaluate every schedule constraint; returns (name, satisfied) pairs."""
    beta, gamma, lam = schedule.beta, schedule.gamma, schedule.lam
    out: list[tuple[str, bool]] = []

    with mp.workdps(_DPS):
        bs = [schedule.b(k) for k in range(1, k_max + 2)]
        ds = [schedule.d(k) for k in range(1, k_max + 2)]

        out.append(("b_k >= d_k > 0", all(b >= d > 0 for b, d in zip(bs, ds))))
        out.append(
            (
                "d_{k+1} >= 2(d_k + b_k)",
                all(ds[k + 1] >= 2 * (ds[k] + bs[k]) for k in range(k_max)),
            )
        )
        out.append(("d_k >= 1", all(d >= 1 for d in ds)))

        if schedule.family == "uf":
            out.append(("lam > e", lam > math.e))
            zeta_term = zeta_direct(math.log(lam)) if lam > math.e else float("inf")
            out.append(
                ("(8 gamma / beta)(zeta(ln lam) - 1) <= 1",
                 (8 * gamma / beta) * (zeta_term - 1) <= 1)
            )
            ok_fk = True
            for k in range(1, k_max + 1):
                fk = f_k(schedule, k)
                if not (fk > (ds[k - 1] + 1) / (bs[k - 1] - 1) > 0):
                    ok_fk = False
                    break
            out.append(("f_k > (d_k+1)/(b_k-1) > 0", ok_fk))
            out.append(("beta lam > 2 gamma", beta * lam > 2 * gamma))
            out.append(
                ("gamma >= 2 gamma/lam + 2 beta + lam^(-2 ln 2)",
                 gamma >= 2 * gamma / lam + 2 * beta + lam ** (-2 * math.log(2)))
            )
            out.append(("gamma lam >= 2", gamma * lam >= 2))
        else:
            out.append(
                ("b_k - 1 > d_k + 1",
                 all(b - 1 > d + 1 for b, d in zip(bs, ds)))
            )
            out.append(("gamma lam >= 2", gamma * lam >= 2))
            out.append(("beta lam > gamma", beta * lam > gamma))
            out.append(
                ("gamma lam - 1/lam >= 2(gamma + 2 beta lam)",
                 gamma * lam - 1 / lam >= 2 * (gamma + 2 * beta * lam))
            )
    return out


# -- cluster decompositions ----------------------------------------------------


@dataclass
class ClusterInfo:
    level: int
    edges: frozenset[int]
    diameter: int
    separation: int | None  # None when nothing else remains


@dataclass
class ClusterDecomposition:
    n_sets: list[frozenset[int]]  # n_sets[k] = N_k
    clusters: list[ClusterInfo]  # all levels, ascending
    max_level: int
    emptied: bool

    def N(self, k: int) -> frozenset[int]:
        if k < len(self.n_sets):
            return self.n_sets[k]
        return self.n_sets[-1]

    def E(self, k: int) -> frozenset[int]:
        return self.N(k) - self.N(k + 1)

    def clusters_at(self, k: int) -> list[ClusterInfo]:
        return [c for c in self.clusters if c.level == k]


@dataclass
class IsolatedDecomposition:
    n_sets: list[frozenset[int]]  # n_sets[k] = the level-k isolated set
    max_level: int
    emptied: bool

    def N(self, k: int) -> frozenset[int]:
        if k < len(self.n_sets):
            return self.n_sets[k]
        return self.n_sets[-1]

    def E(self, k: int) -> frozenset[int]:
        return self.N(k) - self.N(k + 1)


def _pairwise_distances(g: DetectorGraph, edges: list[int]) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for e in edges:
        dist = g._edge_bfs(e)
        for e2 in edges:
            d = int(dist[e2])
            out[(e, e2)] = d if d >= 0 else 10**9
    return out


def decompose_clustered(
    g: DetectorGraph, error_edges, schedule: ScaleSchedule, max_level: int = 64
) -> ClusterDecomposition:
    """Peel off (d_k, b_k)-clusters level by level.

    Clusters are found as the connected components of the relation
    dist <= b_k on the surviving edges, kept only when their diameter is at
    most d_k.  For b_k >= d_k this is exactly the set of maximal
    (d_k, b_k)-clusters: any cluster is closed under the b_k-neighbor
    relation, so it is a union of components, and a component inside a
    cluster is itself one.
    """
    current = frozenset(int(e) for e in error_edges)
    for e in current:
        if not (0 <= e < g.n_edges):
            raise ValueError(f"unknown edge id {e}")
    n_sets = [current]
    clusters: list[ClusterInfo] = []
    emptied = not current
    dists = _pairwise_distances(g, sorted(current))

    level = 0
    while current and level < max_level:
        level += 1
        b_k = float(schedule.b(level))
        d_k = float(schedule.d(level))
        comps = _components_within(sorted(current), dists, b_k)
        removed: set[int] = set()
        for comp in comps:
            diam = max((dists[(a, c)] for a in comp for c in comp), default=0)
            if diam <= d_k:
                rest = current - comp
                sep = (
                    min(dists[(a, c)] for a in comp for c in rest) if rest else None
                )
                clusters.append(
                    ClusterInfo(level, frozenset(comp), diam, sep)
                )
                removed |= comp
        current = current - removed
        n_sets.append(current)
        emptied = not current

    return ClusterDecomposition(n_sets, clusters, level, emptied)


def _components_within(
    edges: list[int], dists: dict[tuple[int, int], int], radius: float
) -> list[set[int]]:
    comps: list[set[int]] = []
    unseen = set(edges)
    while unseen:
        start = min(unseen)
        unseen.discard(start)
        comp = {start}
        frontier = [start]
        while frontier:
            e = frontier.pop()
            near = [e2 for e2 in unseen if dists[(e, e2)] <= radius]
            for e2 in near:
                unseen.discard(e2)
                comp.add(e2)
                frontier.append(e2)
        comps.append(comp)
    return comps


def is_isolated_in(
    g: DetectorGraph, edge_set: frozenset[int], e: int, r: float, big_r: float,
    dists: dict[tuple[int, int], int] | None = None,
) -> bool:
    """True iff no edge of the set lies in e's (r, big_r] annulus."""
    if dists is None:
        dist = g._edge_bfs(e)
        return not any(r < int(dist[e2]) <= big_r for e2 in edge_set if e2 != e)
    return not any(r < dists[(e, e2)] <= big_r for e2 in edge_set if e2 != e)


def decompose_isolated(
    g: DetectorGraph, error_edges, schedule: ScaleSchedule, max_level: int = 64
) -> IsolatedDecomposition:
    """Peel off (d_k/2, b_k + d_k/2)-isolated edges level by level."""
    current = frozenset(int(e) for e in error_edges)
    for e in current:
        if not (0 <= e < g.n_edges):
            raise ValueError(f"unknown edge id {e}")
    n_sets = [current]
    dists = _pairwise_distances(g, sorted(current))
    emptied = not current

    level = 0
    while current and level < max_level:
        level += 1
        r = float(schedule.d(level)) / 2.0
        big_r = float(schedule.b(level)) + r
        removed = {
            e for e in current if is_isolated_in(g, current, e, r, big_r, dists)
        }
        current = current - removed
        n_sets.append(current)
        emptied = not current

    return IsolatedDecomposition(n_sets, level, emptied)


# -- minimal witness sets -------------------------------------------------------


@dataclass
class WitnessReport:
    edge: int
    level: int
    minimal_size: int
    witness_count: int
    witnesses: list[frozenset[int]]
    contained_in_ball: bool
    count_bound: float
    count_ok: bool
    size_ok: bool


def minimal_witness_check(
    g: DetectorGraph,
    schedule: ScaleSchedule,
    k: int,
    edge: int,
    ball_coeff: float,
    ball_power: float,
    max_edges: int = 20,
) -> WitnessReport:
    """Enumerate the minimal edge sets that keep `edge` isolated-set level k.

    Exhausts subsets of the graph's edges in increasing size until some
    subset N proves `edge` in the level-k isolated set; checks |N| = 2^k,
    N inside the d_k/2 ball, and the product bound on the number of
    witnesses (with the caller-supplied ball-growth constants of the toy
    graph).
    """
    from itertools import combinations

    if g.n_edges > max_edges:
        raise ValueError(
            f"graph has {g.n_edges} edges; witness enumeration capped at {max_edges}"
        )
    if k < 0 or k > 2:
        raise ValueError("witness enumeration supported for k <= 2")

    def survives(n_set: frozenset[int]) -> bool:
        dec = decompose_isolated(g, n_set, schedule, max_level=k)
        return edge in dec.N(k)

    others = [e for e in range(g.n_edges) if e != edge]
    witnesses: list[frozenset[int]] = []
    minimal = None
    for extra in range(0, g.n_edges):
        for combo in combinations(others, extra):
            n_set = frozenset((edge, *combo))
            if survives(n_set):
                witnesses.append(n_set)
        if witnesses:
            minimal = extra + 1
            break
    assert minimal is not None, "the full edge set must be a witness"

    # A level-k witness reaches at most b_k + d_k/2 from the level-(k-1)
    # witness balls, which the separation constraint folds into the
    # next-level radius d_{k+1}/2.
    radius = float(schedule.d(k + 1)) / 2 if k >= 1 else 0.0
    ball = g.ball(edge, int(radius)) if k >= 1 else {edge}
    contained = all(w <= ball for w in witnesses) if k >= 1 else True

    bound = 1.0
    for j in range(k):
        lvl = k - j
        bound *= (
            ball_coeff * (float(schedule.b(lvl)) + float(schedule.d(lvl)) / 2.0) ** ball_power
        ) ** (2**j)

    return WitnessReport(
        edge=edge,
        level=k,
        minimal_size=minimal,
        witness_count=len(witnesses),
        witnesses=witnesses,
        contained_in_ball=contained,
        count_bound=bound,
        count_ok=len(witnesses) <= bound,
        size_ok=minimal == 2**k,
    )


# -- probability bounds and the threshold ----------------------------------------


def p_k_bound_log10(
    k: int, p: float, xi: float, ball_coeff: float, ball_power: float,
    schedule: ScaleSchedule,
) -> float:
    """log10 of the level-k clustering probability bound.

    The bound is (xi p)^(2^k) * prod_{j=0}^{k-1} [Lambda (b_{k-j} +
    d_{k-j}/2)^Delta]^(2^j), evaluated in log domain.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if p <= 0:
        return float("-inf")
    with mp.workdps(_DPS):
        log_total = mp.power(2, k) * mp.log(mp.mpf(xi) * p)
        for j in range(k):
            lvl = k - j
            term = mp.mpf(ball_coeff) * mp.power(
                schedule.b(lvl) + schedule.d(lvl) / 2, ball_power
            )
            log_total += mp.power(2, j) * mp.log(term)
        return float(log_total / mp.log(10))


@dataclass
class ThresholdReport:
    schedule: ScaleSchedule
    xi: float
    ball_coeff: float
    ball_power: float
    c: float
    p_th: float
    log10_p_th: float
    constraints: list[tuple[str, bool]]
    eta_sup: float  # admissible eta exponents lie strictly below (uf) or at (greedy)
    constraints_ok: bool = field(init=False)

    def __post_init__(self) -> None:
        self.constraints_ok = all(ok for _, ok in self.constraints)

    def k0(self, d: int) -> int:
        """Largest k whose grown clusters must stay smaller than distance d."""
        k = 0
        with mp.workdps(_DPS):
            while True:
                kk = k + 1
                dk = self.schedule.d(kk)
                fk = f_k(self.schedule, kk)
                if dk + (dk + 1) / fk + 1 < d:
                    k = kk
                else:
                    return k

    def kbar(self, d: int, p: float) -> int:
        """Largest k with d^3 (p/p_th)^(2^k) >= 1 (0 when already below at k=1)."""
        if p <= 0:
            return 0
        if p >= self.p_th:
            raise ValueError("kbar is defined for p below the threshold")
        with mp.workdps(_DPS):
            ratio = mp.log(mp.mpf(p)) - mp.log(mp.mpf(self.p_th))
            k = 0
            while True:
                kk = k + 1
                if 3 * mp.log(d) + mp.power(2, kk) * ratio >= 0:
                    k = kk
                else:
                    return k

    def to_dict(self) -> dict:
        return {
            "family": self.schedule.family,
            "beta": self.schedule.beta,
            "gamma": self.schedule.gamma,
            "lambda": self.schedule.lam,
            "xi": self.xi,
            "ball_coeff": self.ball_coeff,
            "ball_power": self.ball_power,
            "c": self.c,
            "p_th": self.p_th,
            "log10_p_th": self.log10_p_th,
            "eta_sup": self.eta_sup,
            "constraints": [[name, bool(ok)] for name, ok in self.constraints],
            "constraints_ok": self.constraints_ok,
        }


# -- stopping-guarantee instrumentation -------------------------------------------


@dataclass
class StoppingReport:
    """Round-by-round audit of extended-cluster growth against the guarantee.

    An extended cluster is the equivalence closure of union-find clusters and
    error clusters that touch; its level is the highest error-cluster level
    inside.  Three facts are checked per round:

    * merge order: a still-growing extended cluster never merges with one of
      equal or higher level;
    * margin: the overgrowth beyond the error-cluster region stays within
      (d_k + 1) / (2 f_k).  The margin is measured as the maximum distance
    from the grown region to the error cluster's own vertices, which is the
      quantity the extended-cluster diameter bound d_k + 1 + 2 m_k uses; the
      active-detector readings are reported alongside;
    * growth duration: a level-k extended cluster grows for at most d_k + 1
      rounds when its clusters pair internally, and at most 2(d_k + 1)
      rounds when validity requires reaching a boundary vertex.  Boundary
      vertices never grow, so absorbing one is one-sided and takes two
      rounds per edge instead of one; the stated d_k + 1 presumes two-sided
      approach.
    """

    violations: list[str] = field(default_factory=list)
    max_margin: float = 0.0  # overgrowth beyond the error-cluster region
    max_margin_active_min: float = 0.0  # max over region of min dist to actives
    max_margin_active_max: float = 0.0  # max over region of max dist to actives
    margin_by_level: dict[int, float] = field(default_factory=dict)
    growth_rounds_by_level: dict[int, int] = field(default_factory=dict)
    levels_seen: set[int] = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return not self.violations


def _multi_source_distances(g: DetectorGraph, sources) -> dict[int, int]:
    """BFS distances from a vertex set, not expanding through boundaries."""
    dist: dict[int, int] = {int(v): 0 for v in sources}
    frontier = sorted(dist)
    while frontier:
        nxt = []
        for u in frontier:
            if g.is_boundary[u] and dist[u] > 0:
                continue
            for v, _eid in g.neighbors[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def verify_stopping_guarantee(
    g: DetectorGraph,
    trace,
    decomp: ClusterDecomposition,
    schedule: ScaleSchedule,
) -> StoppingReport:
    """Check one decoded shot's trace against the extended-cluster guarantee.

    The trace must have been recorded with `uf_decode(..., with_trace=True)`
    and the decomposition must describe the same shot's error edge set.
    """
    report = StoppingReport()
    syndrome = list(trace.syndrome)
    if not syndrome:
        return report
    if not trace.rounds or trace.rounds[0].get("grown") is None:
        raise ValueError("trace was recorded without snapshots (with_trace=False)")
    if not decomp.emptied:
        report.violations.append("error set not fully decomposed; guarantee unchecked")
        return report

    err_clusters = decomp.clusters
    endpoints: list[frozenset[int]] = []  # detector endpoints per error cluster
    regions: list[frozenset[int]] = []  # all endpoints, boundary included
    for c in err_clusters:
        pts: set[int] = set()
        reg: set[int] = set()
        for e in c.edges:
            for w in (int(g.edge_u[e]), int(g.edge_v[e])):
                reg.add(w)
                if not g.is_boundary[w]:
                    pts.add(w)
        endpoints.append(frozenset(pts))
        regions.append(frozenset(reg))

    # Timeline union-find over seeds (node ids) and error clusters (-1 - idx).
    from .unionfind import DisjointSet

    dsu = DisjointSet()
    for v in syndrome:
        dsu.add(v)
    for i in range(len(err_clusters)):
        dsu.add(-1 - i)
        for v in syndrome:
            if v in endpoints[i]:
                dsu.union(v, -1 - i)

    def class_key(x: int) -> int:
        return dsu.find(x)

    def class_level(root: int) -> int:
        lv = 0
        for i, c in enumerate(err_clusters):
            if dsu.find(-1 - i) == root:
                lv = max(lv, c.level)
        return lv

    syndrome_set = set(syndrome)
    prev_valid: dict[int, bool] = {v: False for v in syndrome}  # per seed

    def seeds_of_members(members: frozenset[int]) -> list[int]:
        return [v for v in members if v in syndrome_set]

    for rec in trace.rounds:
        t = rec["round"]
        pre_class = {v: class_key(v) for v in syndrome}
        pre_level = {r: class_level(r) for r in set(pre_class.values())}
        pre_stable: dict[int, bool] = {r: True for r in pre_level}
        for v in syndrome:
            if not prev_valid[v]:
                pre_stable[pre_class[v]] = False

        # Add this round's contact links.
        for snap in rec["clusters"]:
            seeds = seeds_of_members(snap.members)
            for a, b in zip(seeds, seeds[1:]):
                dsu.union(a, b)
            for i, c in enumerate(err_clusters):
                touched = bool(snap.members & endpoints[i]) or any(
                    snap.half_edges.get(e, 0) > 0 for e in c.edges
                )
                if touched:
                    dsu.union(seeds[0], -1 - i)

        # Merge-order: previously distinct classes now joined.
        post_root: dict[int, int] = {}
        for v in syndrome:
            post_root[pre_class[v]] = class_key(v)
        joined: dict[int, list[int]] = {}
        for old, new in post_root.items():
            joined.setdefault(new, []).append(old)
        for new, olds in joined.items():
            if len(olds) < 2:
                continue
            for p_old in olds:
                for q_old in olds:
                    if p_old == q_old:
                        continue
                    if not pre_stable[p_old] and pre_level[p_old] <= pre_level[q_old]:
                        report.violations.append(
                            f"round {t}: growing level-{pre_level[p_old]} extended "
                            f"cluster merged with level-{pre_level[q_old]}"
                        )

        # Per-class level, growth-duration, and margin checks.
        roots = {class_key(v) for v in syndrome}
        level_of = {r: class_level(r) for r in roots}
        grew_classes: set[int] = set()
        for root, members in rec["grown"] or ():
            seeds = seeds_of_members(members)
            if seeds:
                grew_classes.add(class_key(seeds[0]))

        region: dict[int, set[int]] = {r: set() for r in roots}
        # Half-grown frontier edges extend the region half a step beyond the
        # member vertex on their covered side.
        half_sides: dict[int, list[int]] = {r: [] for r in roots}
        for snap in rec["clusters"]:
            seeds = seeds_of_members(snap.members)
            r = class_key(seeds[0])
            region[r].update(snap.members)
            for eid, cov in snap.half_edges.items():
                if 0 < cov < 1:
                    for w in (int(g.edge_u[eid]), int(g.edge_v[eid])):
                        if w in snap.members:
                            half_sides[r].append(w)

        for r in roots:
            k = level_of[r]
            report.levels_seen.add(k)
            if k == 0:
                continue
            d_k = float(schedule.d(k))
            f_kk = float(f_k(schedule, k))
            cluster_idx = [
                i for i in range(len(err_clusters)) if dsu.find(-1 - i) == r
            ]
            err_region: set[int] = set()
            for i in cluster_idx:
                err_region |= regions[i]
            needs_boundary = any(g.is_boundary[v] for v in err_region)
            if r in grew_classes:
                report.growth_rounds_by_level[k] = max(
                    report.growth_rounds_by_level.get(k, 0), t
                )
                limit = 2 * (d_k + 1) if needs_boundary else d_k + 1
                if t > limit:
                    report.violations.append(
                        f"round {t}: level-{k} extended cluster still growing "
                        f"past its limit {limit:.3f}"
                    )
            actives = [
                v
                for i in cluster_idx
                if err_clusters[i].level == k
                for v in endpoints[i]
                if v in syndrome_set
            ]
            # Margin: overgrowth beyond the error-cluster region.
            if err_region:
                dist = _multi_source_distances(g, err_region)
                m_over = 0.0
                for v in region[r]:
                    if dist.get(v, -1) >= 0:
                        m_over = max(m_over, float(dist[v]))
                for w in half_sides[r]:
                    if dist.get(w, -1) >= 0:
                        m_over = max(m_over, dist[w] + 0.5)
                rate_bound = t / (2 * f_kk)
                cap = (d_k + 1) / (2 * f_kk) * (2 if needs_boundary else 1)
                report.max_margin = max(report.max_margin, m_over)
                report.margin_by_level[k] = max(
                    report.margin_by_level.get(k, 0.0), m_over
                )
                if m_over > rate_bound + 1e-9:
                    report.violations.append(
                        f"round {t}: level-{k} margin {m_over} exceeds the "
                        f"growth rate bound t/(2 f_k) = {rate_bound:.3f}"
                    )
                if m_over > cap + 1e-9:
                    report.violations.append(
                        f"round {t}: level-{k} margin {m_over} exceeds "
                        f"its cap {cap:.3f}"
                    )
            if actives:
                dists = [g.vertex_distances_cached(a) for a in actives]
                m_min = 0.0
                m_max = 0.0
                for v in region[r]:
                    per = [int(dd[v]) for dd in dists if dd[v] >= 0]
                    if per:
                        m_min = max(m_min, min(per))
                        m_max = max(m_max, max(per))
                report.max_margin_active_min = max(
                    report.max_margin_active_min, float(m_min)
                )
                report.max_margin_active_max = max(
                    report.max_margin_active_max, float(m_max)
                )

        prev_valid = {v: False for v in syndrome}
        for snap in rec["clusters"]:
            if snap.valid:
                for v in seeds_of_members(snap.members):
                    prev_valid[v] = True

    return report


def analytical_threshold(
    xi: float,
    ball_coeff: float,
    ball_power: float,
    schedule: ScaleSchedule,
) -> ThresholdReport:
    """Closed-form threshold for a schedule and graph constants.

    p_th = 1 / [xi * Lambda * lam^(c Delta) * (beta + (gamma + lam^(-f(1)))/2)^Delta]
    """
    constraints = check_constraints(schedule)
    c = series_constant(schedule.family)
    with mp.workdps(_DPS):
        lam = mp.mpf(schedule.lam)
        f1 = schedule.exponent(1)
        denom = (
            mp.mpf(xi)
            * mp.mpf(ball_coeff)
            * mp.power(lam, mp.mpf(c) * ball_power)
            * mp.power(
                mp.mpf(schedule.beta)
                + (mp.mpf(schedule.gamma) + mp.power(lam, -f1)) / 2,
                ball_power,
            )
        )
        p_th = 1 / denom
        log10_p_th = float(-mp.log(denom) / mp.log(10))
        eta_sup = float(mp.log(2) / mp.log(lam))
    return ThresholdReport(
        schedule=schedule,
        xi=xi,
        ball_coeff=ball_coeff,
        ball_power=ball_power,
        c=c,
        p_th=float(p_th),
        log10_p_th=log10_p_th,
        constraints=constraints,
        eta_sup=eta_sup,
    )
