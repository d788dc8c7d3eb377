"""Triple-pattern resolution over an Rdfcsa.

Every pattern has a rotation of (s, p, o) in which the bound components come
first; searching for that prefix yields an interval of positions in the
region of the first bound component.  Three ways to find the interval are
provided: plain binary search (``base``), interval filtering by a sequential
Psi scan (``forward``) and subinterval binary search from the last bound
component backwards (``backward``).
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import O, P, ROLE_NAMES, ROLES, S

BASE = "base"
FORWARD = "forward"
BACKWARD = "backward"
STRATEGIES = (BASE, FORWARD, BACKWARD)
DIRECT = "direct"
SCAN_ALL = "all"

# bound-role set -> rotation of roles with the bound ones first
ROTATIONS = {
    (S, P, O): (S, P, O),
    (S, P): (S, P, O),
    (S, O): (O, S, P),
    (P, O): (P, O, S),
    (S,): (S, P, O),
    (P,): (P, O, S),
    (O,): (O, S, P),
    (): (S, P, O),
}


class QueryError(ValueError):
    pass


class TriplePattern(NamedTuple):
    """Each component is an id or None (unbound)."""

    s: Optional[int] = None
    p: Optional[int] = None
    o: Optional[int] = None

    def bound_roles(self):
        return tuple(r for r in ROLES if self[r] is not None)

    def shape(self):
        return "".join(ROLE_NAMES[r].lower() if self[r] is not None else "?" for r in ROLES)

    def matches(self, triple):
        return all(v is None or v == t for v, t in zip(self, triple))


@dataclass(frozen=True)
class SearchPlan:
    strategy: str
    start_region: int
    alpha: tuple          # ((role, id), ...) bound components in rotation order
    rotation: tuple

    @property
    def sorted_role(self):
        """Role by which results come out sorted (first unbound in rotation)."""
        k = len(self.alpha)
        return self.rotation[k] if k < 3 else None


def plan(tp, strategy=None):
    """Choose the search route for a pattern.

    ``strategy`` overrides the default for patterns with two or three bound
    components; it is an error for other shapes.
    """
    tp = TriplePattern(*tp)
    bound = tp.bound_roles()
    rotation = ROTATIONS[bound]
    alpha = tuple((r, tp[r]) for r in rotation[:len(bound)])
    if len(bound) < 2:
        if strategy not in (None, "auto"):
            raise QueryError(f"strategy {strategy!r} does not apply to pattern {tp.shape()}")
        return SearchPlan(SCAN_ALL if not bound else DIRECT, rotation[0], alpha, rotation)
    if strategy in (None, "auto"):
        strategy = BACKWARD if bound == (P, O) else FORWARD
    if strategy not in STRATEGIES:
        raise QueryError(f"unknown strategy {strategy!r}")
    return SearchPlan(strategy, rotation[0], alpha, rotation)


def _next(role):
    return (role + 1) % 3


# -- the three strategies --------------------------------------------------------


def _compare(idx, pos, role, alpha):
    """Compare the circular reading at ``pos`` with ``alpha``: -1, 0 or 1."""
    last = len(alpha) - 1
    for k, (_, want) in enumerate(alpha):
        got = idx.symbol(role, pos)
        if got != want:
            return -1 if got < want else 1
        if k < last:
            pos = idx.psi(role, pos)
            role = _next(role)
    return 0


def search_base(idx, plan):
    """Binary search for alpha over the whole start region."""
    alpha = plan.alpha
    if not alpha:
        raise QueryError("base search needs at least one bound component")
    role = plan.start_region
    for r, ident in alpha:
        if idx.rank_of_id(r, ident) is None:
            return None
    lo, hi = 1, idx.n + 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if _compare(idx, mid, role, alpha) < 0:
            lo = mid + 1
        else:
            hi = mid
    first = lo
    if first > idx.n or _compare(idx, first, role, alpha) != 0:
        return None
    lo, hi = first, idx.n + 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if _compare(idx, mid, role, alpha) <= 0:
            lo = mid + 1
        else:
            hi = mid
    return first, lo - 1


def _intervals(idx, alpha):
    out = []
    for role, ident in alpha:
        rng = idx.symbol_range(role, ident)
        if rng is None:
            return None
        out.append(rng)
    return out


def _filter_scan(idx, role, interval, target):
    """Contiguous subinterval of ``interval`` whose Psi lands in ``target``.

    Psi increases inside a symbol interval, so the scan stops at the first
    value past the target and only the end points are kept.
    """
    l, r = interval
    tl, tr = target
    first = last = None
    for pos, v in enumerate(idx.psi_range(role, l, r), l):
        if v > tr:
            break
        if v >= tl:
            if first is None:
                first = pos
            last = pos
    return None if first is None else (first, last)


def _walk(idx, role, pos, steps):
    for _ in range(steps):
        pos = idx.psi(role, pos)
        role = _next(role)
    return pos


def search_forward(idx, plan):
    alpha = plan.alpha
    if len(alpha) < 2:
        raise QueryError("forward check needs two or more bound components")
    ranges = _intervals(idx, alpha)
    if ranges is None:
        return None
    roles = [r for r, _ in alpha]
    if len(alpha) == 2:
        return _filter_scan(idx, roles[0], ranges[0], ranges[1])
    # three bound: start from the shortest interval, ties in S, P, O order
    by_role = dict(zip(roles, ranges))
    start = min(ROLES, key=lambda r: (by_role[r][1] - by_role[r][0], r))
    mid, last = _next(start), _next(_next(start))
    sub = _filter_scan(idx, start, by_role[start], by_role[mid])
    if sub is None:
        return None
    tl, tr = by_role[last]
    hit = None
    for pos, j in enumerate(idx.psi_range(start, sub[0], sub[1]), sub[0]):
        k = idx.psi(mid, j)
        if tl <= k <= tr:
            hit = pos
            break
    if hit is None:
        return None
    # report in the region of alpha[0] (= S for three bound components)
    pos = _walk(idx, start, hit, (roles[0] - start) % 3)
    return pos, pos


def _subinterval(idx, role, interval, target):
    """Binary search inside ``interval`` for positions whose Psi is in target."""
    l, r = interval
    tl, tr = target
    seg = idx.segments[role]
    lo, hi = l, r + 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if seg.access(mid) < tl:
            lo = mid + 1
        else:
            hi = mid
    first = lo
    lo, hi = first, r + 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if seg.access(mid) <= tr:
            lo = mid + 1
        else:
            hi = mid
    return (first, lo - 1) if first <= lo - 1 else None


def search_backward(idx, plan):
    alpha = plan.alpha
    if len(alpha) < 2:
        raise QueryError("backward check needs two or more bound components")
    ranges = _intervals(idx, alpha)
    if ranges is None:
        return None
    cur = ranges[-1]
    for k in range(len(alpha) - 2, -1, -1):
        cur = _subinterval(idx, alpha[k][0], ranges[k], cur)
        if cur is None:
            return None
    return cur


def locate(idx, tp, strategy=None):
    """ResultSet for a pattern, using ``strategy`` when it applies."""
    tp = TriplePattern(*tp)
    pl = plan(tp, strategy)
    if pl.strategy == SCAN_ALL:
        interval = (1, idx.n)
    elif pl.strategy == DIRECT:
        role, ident = pl.alpha[0]
        interval = idx.symbol_range(role, ident)
    else:
        interval = SEARCHERS[pl.strategy](idx, pl)
    return ResultSet(idx, tp, pl, interval)


SEARCHERS = {BASE: search_base, FORWARD: search_forward, BACKWARD: search_backward}


def _second_hop(idx, role, targets):
    """Psi lookup for many positions of one region.

    When the targets are dense enough, one sequential decode of the span
    they cover is cheaper than a sampled random access per target.
    """
    seg = idx.segments[role]
    lo, hi = min(targets), max(targets)
    if seg.mode == "plain" or len(targets) * max(seg.t_psi, 1) < 2 * (hi - lo + 1):
        return seg.access
    span = seg.decode_range(lo, hi)
    return lambda j: span[j - lo]


class ResultSet:
    """Located answers of one pattern: an interval in the start region.

    Components are produced on demand, so callers can fetch only the ones
    they need and fill the rest later from the kept positions.
    """

    def __init__(self, idx, pattern, plan, interval):
        self.idx = idx
        self.pattern = pattern
        self.plan = plan
        self.region = plan.start_region
        self.interval = interval

    @property
    def count(self):
        if self.interval is None:
            return 0
        return self.interval[1] - self.interval[0] + 1

    def __len__(self):
        return self.count

    def positions(self):
        if self.interval is None:
            return range(0)
        return range(self.interval[0], self.interval[1] + 1)

    def _steps(self, role):
        return (role - self.region) % 3

    def component(self, pos, role):
        """Value of ``role`` for the answer at start-region position ``pos``."""
        bound = self.pattern[role]
        if bound is not None:
            return bound
        idx = self.idx
        r = self.region
        for _ in range(self._steps(role)):
            pos = idx.psi(r, pos)
            r = _next(r)
        return idx.symbol(r, pos)

    def rows(self, need=ROLES):
        """[(pos, (s, p, o))] with roles outside ``need`` left as None.

        The first Psi step over the interval is decoded sequentially; the
        second step is random access.
        """
        if self.interval is None:
            return []
        idx = self.idx
        region = self.region
        l, r = self.interval
        need = set(need)
        todo = [role for role in ROLES if role in need and self.pattern[role] is None]
        base = list(self.pattern)
        depth = max((self._steps(role) for role in todo), default=0)
        r1, r2 = _next(region), _next(_next(region))
        first_hop = idx.psi_range(region, l, r) if depth >= 1 else None
        second = _second_hop(idx, r1, first_hop) if depth == 2 else None
        out = []
        for off, pos in enumerate(range(l, r + 1)):
            vals = base[:]
            if region in todo:
                vals[region] = idx.symbol(region, pos)
            if depth >= 1:
                j = first_hop[off]
                if r1 in todo:
                    vals[r1] = idx.symbol(r1, j)
                if depth == 2:
                    vals[r2] = idx.symbol(r2, second(j))
            out.append((pos, tuple(vals)))
        return out

    def fill(self, pos, partial):
        """Complete a partial triple from its position."""
        return tuple(v if v is not None else self.component(pos, role)
                     for role, v in zip(ROLES, partial))

    def triples(self):
        return [t for _, t in self.rows()]


def resolve(idx, tp, fill="all", strategy=None, need=None):
    """Answer triples for a pattern, ascending by start-region position.

    With ``fill='needed-only'`` only the roles in ``need`` are computed and
    the others stay None; ``ResultSet.fill`` completes them later.
    """
    rs = locate(idx, tp, strategy)
    if fill == "all":
        return rs.triples()
    if fill != "needed-only":
        raise QueryError(f"unknown fill mode {fill!r}")
    return [t for _, t in rs.rows(need or ())]


def count(idx, tp, strategy=None):
    return locate(idx, tp, strategy).count
