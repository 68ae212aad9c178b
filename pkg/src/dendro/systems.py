"""Partial-isomorphism systems over a universe.

A system is a finite substructure A together with an isomorphism phi between
two subsets B, C of A.  The module provides the validity checker, the orbit
machinery, the membership test for the well-behaved subclass (the one with
the amalgamation property), and the constructive engines: fixed-point
insertion, cofinal extension, joint embedding and amalgamation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import (
    ConstructionFailed,
    FiniteOrderUnsupported,
    HypothesesViolated,
    InvalidSystem,
    NotFixedPoint,
    NotInL,
    OrbitConflict,
)
from .extension import PartialIso
from .median import INF
from .universe import Universe


@dataclass(frozen=True)
class System:
    """A finite substructure with a partial isomorphism phi: B -> C, B, C
    subsets of A.  The universe snapshot is owned and treated as immutable."""

    universe: Universe
    A: FrozenSet[int]
    B: FrozenSet[int]
    C: FrozenSet[int]
    phi: Tuple[Tuple[int, int], ...]

    @staticmethod
    def make(u: Universe, A: Iterable[int], phi: Mapping[int, int],
             B: Optional[Iterable[int]] = None, C: Optional[Iterable[int]] = None) -> "System":
        phi = dict(phi)
        B = frozenset(B if B is not None else phi.keys())
        C = frozenset(C if C is not None else phi.values())
        return System(u, frozenset(A), B, C, tuple(sorted(phi.items())))

    @property
    def phi_map(self) -> Dict[int, int]:
        return dict(self.phi)

    def to_json(self) -> dict:
        return {
            "universe": self.universe.to_json(),
            "A": sorted(self.A),
            "B": sorted(self.B),
            "C": sorted(self.C),
            "phi": [[b, c] for b, c in self.phi],
        }

    @staticmethod
    def from_json(data: dict) -> "System":
        u = Universe.from_json(data["universe"])
        phi = {b: c for b, c in data["phi"]}
        return System(u, frozenset(data["A"]), frozenset(data["B"]),
                      frozenset(data["C"]), tuple(sorted(phi.items())))


@dataclass
class ValidationReport:
    ok: bool
    reason: str = ""
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def validate_system(s: System) -> ValidationReport:
    """B, C inside A, phi a bijection preserving labels and betweenness (the
    induced map on medians must preserve labels as well)."""
    u = s.universe
    phi = s.phi_map
    if not set(phi) <= s.B or set(phi) != set(s.B):
        return ValidationReport(False, "phi not defined exactly on B")
    if set(phi.values()) != set(s.C):
        return ValidationReport(False, "phi image is not C")
    if not (s.B <= s.A and s.C <= s.A):
        return ValidationReport(False, "B and C must be subsets of A")
    if len(set(phi.values())) != len(phi):
        return ValidationReport(False, "phi not injective")
    for v in s.A:
        u.check_point(v)
    for b, c in phi.items():
        if u.label(b) != u.label(c):
            return ValidationReport(False, "label broken", (b, c))
    pts = sorted(phi)
    for x, y, z in combinations(pts, 3):
        for t in ((x, y, z), (y, x, z), (z, x, y)):
            if u.between(*t) != u.between(phi[t[0]], phi[t[1]], phi[t[2]]):
                return ValidationReport(False, "betweenness broken", t)
    # medians must carry matching labels for the map to extend
    for x, y, z in combinations(pts, 3):
        m = u.center(x, y, z)
        m2 = u.center(phi[x], phi[y], phi[z])
        if u.label(m) != u.label(m2):
            return ValidationReport(False, "median label broken", (x, y, z))
    return ValidationReport(True)


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------


@dataclass
class Orbit:
    points: List[int]  # chain order z0 -> z1 -> ...; for cycles, starts at min id
    periodic: bool
    period: Optional[int]

    @property
    def start(self) -> int:
        return self.points[0]

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class OrbitReport:
    orbits: List[Orbit]
    b0: Set[int]

    def orbit_of(self, x: int) -> Orbit:
        for o in self.orbits:
            if x in o.points:
                return o
        raise KeyError(x)

    def is_periodic(self, x: int) -> bool:
        return self.orbit_of(x).periodic


def _orbits_of_map(phi: Mapping[int, int]) -> OrbitReport:
    fwd = dict(phi)
    bwd = {v: k for k, v in fwd.items()}
    pts = set(fwd) | set(fwd.values())
    seen: Set[int] = set()
    orbits: List[Orbit] = []
    for p in sorted(pts):
        if p in seen:
            continue
        # walk backward to the start or around the cycle
        start = p
        trail = {p}
        while start in bwd and bwd[start] not in trail:
            start = bwd[start]
            trail.add(start)
        if start in bwd and bwd[start] in trail:
            # cycle: normalize to min id
            cyc = [start]
            cur = fwd[start]
            while cur != start:
                cyc.append(cur)
                cur = fwd[cur]
            lo = cyc.index(min(cyc))
            cyc = cyc[lo:] + cyc[:lo]
            orbits.append(Orbit(cyc, True, len(cyc)))
            seen.update(cyc)
        else:
            chain = [start]
            cur = start
            while cur in fwd:
                cur = fwd[cur]
                chain.append(cur)
            orbits.append(Orbit(chain, False, None))
            seen.update(chain)
    b0 = {o.points[0] for o in orbits}
    return OrbitReport(orbits, b0)


def phi_orbits(s: System) -> OrbitReport:
    """Partition of B∪C into chains/cycles of the relation x ~ phi(x)."""
    rep = validate_system(s)
    if not rep:
        raise InvalidSystem(rep.reason)
    return _orbits_of_map(s.phi_map)


def orbit_length(phi: Mapping[int, int], x: int) -> int:
    return len(_orbits_of_map(phi).orbit_of(x))


# ---------------------------------------------------------------------------
# Branch orbits around a fixed point
# ---------------------------------------------------------------------------


@dataclass
class BranchOrbit:
    branches: List[FrozenSet[int]]  # chain D, phi(D), ...
    cyclic: bool


def _branch_partition(u: Universe, pts: Iterable[int], x0: int) -> Dict[int, Set[int]]:
    """Group pts (minus x0) by the component of x0 they inhabit, keyed by port."""
    out: Dict[int, Set[int]] = {}
    for p in pts:
        if p == x0:
            continue
        port = u.port_toward(x0, p)
        out.setdefault(port, set()).add(p)
    return out


def branch_orbits(s: System, x0: int) -> List[BranchOrbit]:
    """Chains of branches around a phi-fixed point, following the induced map
    on branches."""
    phi = s.phi_map
    if phi.get(x0) != x0:
        raise NotFixedPoint(f"{x0} is not a fixed point of phi")
    u = s.universe
    parts = _branch_partition(u, s.A, x0)
    branches = {port: frozenset(pts) for port, pts in parts.items()}
    # induced map on branches
    nxt: Dict[int, int] = {}
    for port, pts in branches.items():
        img_ports = set()
        for p in pts:
            if p in phi and p != x0:
                img_ports.add(u.port_toward(x0, phi[p]))
        if len(img_ports) > 1:
            raise InvalidSystem(f"branch at port {port} maps into several branches")
        if img_ports:
            nxt[port] = img_ports.pop()
    prev = {}
    for a, b in nxt.items():
        if b in prev:
            raise InvalidSystem("two branches map onto one branch")
        prev[b] = a
    seen: Set[int] = set()
    out: List[BranchOrbit] = []
    for port in sorted(branches):
        if port in seen:
            continue
        start = port
        trail = {port}
        while start in prev and prev[start] not in trail:
            start = prev[start]
            trail.add(start)
        cyclic = start in prev and prev[start] in trail
        chain = [start]
        seen.add(start)
        cur = start
        while cur in nxt and nxt[cur] not in seen:
            cur = nxt[cur]
            chain.append(cur)
            seen.add(cur)
        out.append(BranchOrbit([branches[p] for p in chain], cyclic))
    return out


# ---------------------------------------------------------------------------
# Membership in the amalgamation class
# ---------------------------------------------------------------------------


@dataclass
class ConditionResult:
    cid: str
    ok: bool
    witness: Optional[tuple] = None


@dataclass
class LReport:
    ok: bool
    conditions: List[ConditionResult]
    b0: Set[int]

    def __bool__(self) -> bool:
        return self.ok

    def failing(self) -> Optional[ConditionResult]:
        for c in self.conditions:
            if not c.ok:
                return c
        return None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "b0": sorted(self.b0),
            "conditions": [
                {"id": c.cid, "ok": c.ok, "witness": list(c.witness) if c.witness else None}
                for c in self.conditions
            ],
        }


def _iterate(phi: Mapping[int, int], x: int, n: int) -> Optional[int]:
    """phi^n(x) when all intermediate iterates are defined, else None."""
    cur = x
    for _ in range(n):
        if cur not in phi:
            return None
        cur = phi[cur]
    return cur


def _strictly_between(u: Universe, z: int, x: int, y: int) -> bool:
    return z not in (x, y) and u.between(z, x, y)


def _ab_exponent(u: Universe, phi: Mapping[int, int], x: int) -> Optional[int]:
    """Least n with phi^n(x) strictly inside the arc from x to phi^{2n}(x)."""
    n = 1
    while True:
        xn = _iterate(phi, x, n)
        x2n = _iterate(phi, x, 2 * n)
        if xn is None or x2n is None:
            return None
        if _strictly_between(u, xn, x, x2n):
            return n
        n += 1


def _condition2_exponent(u: Universe, phi: Mapping[int, int], x: int) -> Optional[int]:
    """Least n such that the three successive orbit medians are strictly
    nested: c(phi^n, phi^2n, phi^3n) inside ]c(x, phi^n, phi^2n), c(phi^2n,
    phi^3n, phi^4n)[."""
    n = 1
    while True:
        pts = [_iterate(phi, x, k * n) for k in range(5)]
        if any(p is None for p in pts):
            return None
        m1 = u.center(pts[0], pts[1], pts[2])
        m2 = u.center(pts[1], pts[2], pts[3])
        m3 = u.center(pts[2], pts[3], pts[4])
        if _strictly_between(u, m2, m1, m3):
            return n
        n += 1


def _in_open_region(u: Universe, x: int, y: int, z: int) -> bool:
    """x lies in the region spanned by the open arc between y and z: the
    median of x, y, z is neither y nor z."""
    if y == z:
        return False
    return u.center(y, z, x) not in (y, z)


def is_in_L(s: System) -> LReport:
    """Check the six defining conditions of the amalgamation class, with the
    canonical generator set (the chain starts)."""
    rep = validate_system(s)
    if not rep:
        raise InvalidSystem(rep.reason)
    u = s.universe
    phi = s.phi_map
    report = _orbits_of_map(phi)
    b0 = report.b0
    conds: List[ConditionResult] = []

    # positive type: A, B, C closed under the center map
    pt_ok, pt_wit = True, None
    for name, pts in (("A", s.A), ("B", s.B), ("C", s.C)):
        if not u.is_c_closed(pts):
            pt_ok, pt_wit = False, (name,)
            break
    conds.append(ConditionResult("positive-type", pt_ok, pt_wit))

    # (1) every B point is a forward iterate of a generator; automatic for
    # the canonical generator set, kept as a structural sanity check
    reach: Set[int] = set()
    for o in report.orbits:
        reach.update(o.points)
    c1 = s.B <= reach
    conds.append(ConditionResult("1-generated", c1, None if c1 else (sorted(s.B - reach)[0],)))

    # (2) generators periodic or with strictly nested orbit medians
    c2_ok, c2_wit = True, None
    for x in sorted(b0):
        if report.is_periodic(x):
            continue
        if _condition2_exponent(u, phi, x) is None:
            c2_ok, c2_wit = False, (x,)
            break
    conds.append(ConditionResult("2-nested-centers", c2_ok, c2_wit))

    # (3) non-periodic points lie between two periodic ones
    periodic_pts = sorted(p for p in s.B if p in phi and report.is_periodic(p))
    c3_ok, c3_wit = True, None
    for x in sorted(s.B):
        if report.is_periodic(x):
            continue
        if not any(_in_open_region(u, x, y, z)
                   for y, z in combinations(periodic_pts, 2)):
            c3_ok, c3_wit = False, (x,)
            break
    conds.append(ConditionResult("3-sandwiched", c3_ok, c3_wit))

    # (4) pairs of translating generators: separated with a periodic point
    # between them, or intertwined with matching orbits
    c4_ok, c4_wit = True, None
    ab: Dict[int, Optional[int]] = {x: _ab_exponent(u, phi, x) for x in b0
                                    if not report.is_periodic(x)}
    ab_pts = sorted(x for x, n in ab.items() if n is not None)
    for x, y in combinations(ab_pts, 2):
        n, m = ab[x], ab[y]
        orb_x = [_iterate(phi, x, k * n) for k in range(len(report.orbit_of(x)))]
        orb_x = [p for p in orb_x if p is not None]
        orb_y = [_iterate(phi, y, k * m) for k in range(len(report.orbit_of(y)))]
        orb_y = [p for p in orb_y if p is not None]
        separated = not (
            any(u.between(p, q1, q2) for p in orb_x for q1, q2 in combinations(orb_y, 2))
            or any(u.between(q, p1, p2) for q in orb_y for p1, p2 in combinations(orb_x, 2))
        )
        if separated:
            if not any(u.between(z, x, y) for z in periodic_pts):
                c4_ok, c4_wit = False, ("separated", x, y)
                break
        else:
            ox, oy = report.orbit_of(x), report.orbit_of(y)
            if len(ox) != len(oy):
                c4_ok, c4_wit = False, ("length", x, y)
                break
            k = len(ox) - 1
            ell = min(n, m)
            x0s, y0s = ox.points[0], oy.points[0]
            xl = _iterate(phi, x0s, ell)
            yl = _iterate(phi, y0s, ell)
            touch = (xl is not None and u.between(y0s, x0s, xl)) or \
                    (yl is not None and u.between(x0s, y0s, yl))
            if not touch or k % ell != 0:
                c4_ok, c4_wit = False, ("intertwined", x, y)
                break
    conds.append(ConditionResult("4-translation-pairs", c4_ok, c4_wit))

    # (5) inside a minimal corridor between periodic points, a point and its
    # projection have orbits of equal length
    c5_ok, c5_wit = True, None
    all_pts = s.B | s.C
    for y, z in combinations(periodic_pts, 2):
        if any(_strictly_between(u, w, y, z) and report.is_periodic(w)
               for w in s.B if w in phi):
            continue
        for x in sorted(s.B):
            if not _in_open_region(u, x, y, z):
                continue
            g = u.center(x, y, z)
            if g not in all_pts:
                c5_ok, c5_wit = False, ("projection-outside", x, y, z)
                break
            if len(report.orbit_of(x)) != len(report.orbit_of(g)):
                c5_ok, c5_wit = False, ("length", x, y, z)
                break
        if not c5_ok:
            break
    conds.append(ConditionResult("5-corridor-sync", c5_ok, c5_wit))

    # (6) A is the c-closure of B and C
    closure = u.c_closure(s.B | s.C)
    c6 = closure == set(s.A)
    conds.append(ConditionResult("6-closure", c6, None if c6 else tuple(sorted(closure ^ set(s.A)))[:3]))

    ok = all(c.ok for c in conds)
    return LReport(ok, conds, b0)
