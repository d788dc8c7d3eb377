"""Two-pattern joins on one shared variable.

The join variable sits in the subject or object slot of each pattern
(ss, so or oo).  A result binding is ``(x, left_residual, right_residual)``
where the residuals are the values of each pattern's other unbound
components in (s, p, o) order; identical bindings are reported once.

Strategies: ``merge`` evaluates both patterns independently and intersects
on the join value; ``left_chain``/``right_chain`` evaluate one side and probe
the other with the join value bound.  Under the four-set dictionary an object
id and a subject id denote the same term only when both are <= |SO|, so an
so join also requires x <= |SO| when ``so_limit`` is given.
"""

from dataclasses import dataclass
from itertools import groupby

from .core import O, P, ROLES, S
from .query import TriplePattern, locate

SS, SO, OO = "ss", "so", "oo"
KINDS = (SS, SO, OO)
JOIN_SLOTS = {SS: (S, S), SO: (O, S), OO: (O, O)}

MERGE = "merge"
LEFT_CHAIN = "left_chain"
RIGHT_CHAIN = "right_chain"
JOIN_STRATEGIES = (MERGE, LEFT_CHAIN, RIGHT_CHAIN)


class JoinError(ValueError):
    pass


@dataclass(frozen=True)
class JoinQuery:
    left: TriplePattern
    right: TriplePattern
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise JoinError(f"unknown join kind {self.kind!r}")
        object.__setattr__(self, "left", TriplePattern(*self.left))
        object.__setattr__(self, "right", TriplePattern(*self.right))
        ls, rs = self.slots
        if self.left[ls] is not None or self.right[rs] is not None:
            raise JoinError("the join slot must be unbound in both patterns")

    @property
    def slots(self):
        return JOIN_SLOTS[self.kind]

    def side(self, which):
        """(pattern, join slot) for 'left' or 'right'."""
        ls, rs = self.slots
        return (self.left, ls) if which == "left" else (self.right, rs)

    def bound_count(self, which):
        pattern, _ = self.side(which)
        return len(pattern.bound_roles())

    def residual_roles(self, which):
        pattern, slot = self.side(which)
        return tuple(r for r in ROLES if r != slot and pattern[r] is None)


@dataclass(frozen=True)
class JoinPlan:
    strategy: str
    fill_schedule: dict   # side -> roles filled only after the join


def planable(jq, strategy):
    """A strategy is usable unless it evaluates (?s,?p,?o) as a first step."""
    if strategy == MERGE:
        return jq.bound_count("left") > 0 and jq.bound_count("right") > 0
    if strategy == LEFT_CHAIN:
        return jq.bound_count("left") > 0
    if strategy == RIGHT_CHAIN:
        return jq.bound_count("right") > 0
    raise JoinError(f"unknown join strategy {strategy!r}")


def plan_join(jq, strategy=None):
    """Fixed heuristic: chain from the side with more bound components."""
    if strategy in (None, "auto"):
        bl, br = jq.bound_count("left"), jq.bound_count("right")
        if bl > br:
            strategy = LEFT_CHAIN
        elif br > bl:
            strategy = RIGHT_CHAIN
        elif jq.kind == OO and bl == 2:
            strategy = MERGE
        else:
            strategy = LEFT_CHAIN
    strategy = {"left": LEFT_CHAIN, "right": RIGHT_CHAIN}.get(strategy, strategy)
    if strategy not in JOIN_STRATEGIES:
        raise JoinError(f"unknown join strategy {strategy!r}")
    if not planable(jq, strategy):
        raise JoinError(f"{strategy} would evaluate (?s,?p,?o) as its first step")
    schedule = {"left": jq.residual_roles("left"), "right": jq.residual_roles("right")}
    return JoinPlan(strategy, schedule)


def _accepts(jq, x, so_limit):
    return not (jq.kind == SO and so_limit is not None and x > so_limit)


def _side_rows(rs, slot, residual, deferred):
    """[(x, pos, residual-or-None)] for a located result set."""
    if deferred:
        return [(t[slot], pos, None) for pos, t in rs.rows((slot,))]
    return [(t[slot], pos, tuple(t[r] for r in residual)) for pos, t in rs.rows()]


def _residual(rs, pos, cached, residual):
    if cached is not None:
        return cached
    return tuple(rs.component(pos, r) for r in residual)


def join_merge(idx, jq, so_limit=None, sorted_shortcut=True, deferred=True):
    """Evaluate both sides, sort by join value where needed, intersect."""
    if not planable(jq, MERGE):
        raise JoinError("merge would evaluate (?s,?p,?o)")
    sides = []
    for which in ("left", "right"):
        pattern, slot = jq.side(which)
        rs = locate(idx, pattern)
        residual = jq.residual_roles(which)
        rows = _side_rows(rs, slot, residual, deferred)
        if not (sorted_shortcut and rs.plan.sorted_role == slot):
            rows.sort(key=lambda row: row[0])
        sides.append((rs, residual, rows))
    (lrs, lres, lrows), (rrs, rres, rrows) = sides
    out = set()
    i = j = 0
    while i < len(lrows) and j < len(rrows):
        a, b = lrows[i][0], rrows[j][0]
        if a < b:
            i += 1
            continue
        if b < a:
            j += 1
            continue
        i2, j2 = i, j
        while i2 < len(lrows) and lrows[i2][0] == a:
            i2 += 1
        while j2 < len(rrows) and rrows[j2][0] == a:
            j2 += 1
        if _accepts(jq, a, so_limit):
            lvals = {_residual(lrs, pos, c, lres) for _, pos, c in lrows[i:i2]}
            rvals = {_residual(rrs, pos, c, rres) for _, pos, c in rrows[j:j2]}
            out.update((a, lv, rv) for lv in lvals for rv in rvals)
        i, j = i2, j2
    return sorted(out)


def join_chain(idx, jq, direction, so_limit=None, so_filter=True, dedup=True, deferred=True):
    """Evaluate one side, then probe the other once per join value."""
    first, second = ("left", "right") if direction in ("left", LEFT_CHAIN) else ("right", "left")
    if not planable(jq, LEFT_CHAIN if first == "left" else RIGHT_CHAIN):
        raise JoinError(f"{first} side is (?s,?p,?o) and cannot be evaluated first")
    pattern, slot = jq.side(first)
    other, other_slot = jq.side(second)
    rs = locate(idx, pattern)
    fres = jq.residual_roles(first)
    sres = jq.residual_roles(second)
    rows = _side_rows(rs, slot, fres, deferred)
    if so_filter and jq.kind == SO and so_limit is not None:
        rows = [row for row in rows if row[0] <= so_limit]
    if dedup:
        rows.sort(key=lambda row: row[0])
        groups = [(x, list(g)) for x, g in groupby(rows, key=lambda row: row[0])]
    else:
        groups = [(row[0], [row]) for row in rows]
    out = set()
    for x, members in groups:
        probe = list(other)
        probe[other_slot] = x
        prs = locate(idx, TriplePattern(*probe))
        if not prs.count or not _accepts(jq, x, so_limit):
            continue
        svals = {tuple(t[r] for r in sres) for t in prs.triples()}
        fvals = {_residual(rs, pos, c, fres) for _, pos, c in members}
        for fv in fvals:
            for sv in svals:
                out.add((x, fv, sv) if first == "left" else (x, sv, fv))
    return sorted(out)


def evaluate(idx, jq, strategy=None, so_limit=None, **options):
    """(bindings, strategy used) with the planner's choice unless overridden."""
    pl = plan_join(jq, strategy)
    if pl.strategy == MERGE:
        opts = {k: v for k, v in options.items() if k in ("sorted_shortcut", "deferred")}
        return join_merge(idx, jq, so_limit, **opts), pl.strategy
    opts = {k: v for k, v in options.items() if k in ("so_filter", "dedup", "deferred")}
    return join_chain(idx, jq, pl.strategy, so_limit, **opts), pl.strategy


# -- join taxonomy ----------------------------------------------------------------


@dataclass(frozen=True)
class JoinClass:
    """Which non-join components are bound: the left pattern's far end and
    predicate, the right pattern's predicate and far end."""

    name: str
    left_end: bool
    left_pred: bool
    right_pred: bool
    right_end: bool

    def representative(self, kind=SO):
        ls, rs = JOIN_SLOTS[kind]
        left = ["?x" if r == ls else None for r in ROLES]
        right = ["?x" if r == rs else None for r in ROLES]
        lend, rend = (O if ls == S else S), (O if rs == S else S)
        left[P] = "p1" if self.left_pred else "?p1"
        right[P] = "p2" if self.right_pred else "?p2"
        left[lend] = _end_name(lend, 1, self.left_end)
        right[rend] = _end_name(rend, 2, self.right_end)
        return f"({','.join(left)})⋈({','.join(right)})"

    def instantiate(self, kind, left_end=None, left_pred=None, right_pred=None, right_end=None):
        """JoinQuery with the given constants in the bound slots."""
        ls, rs = JOIN_SLOTS[kind]
        left, right = [None] * 3, [None] * 3
        lend, rend = (O if ls == S else S), (O if rs == S else S)
        for flag, val, pat, role in ((self.left_end, left_end, left, lend),
                                     (self.left_pred, left_pred, left, P),
                                     (self.right_pred, right_pred, right, P),
                                     (self.right_end, right_end, right, rend)):
            if flag:
                if val is None:
                    raise JoinError(f"class {self.name} needs a constant for every bound slot")
                pat[role] = val
        return JoinQuery(TriplePattern(*left), TriplePattern(*right), kind)


def _end_name(role, k, bound):
    name = ("s", None, "o")[role] + str(k)
    return name if bound else "?" + name


JOIN_CLASSES = (
    JoinClass("A", True, True, True, True),
    JoinClass("B", False, True, True, True),
    JoinClass("C", False, True, True, False),
    JoinClass("D", True, True, False, True),
    JoinClass("E1", False, True, False, True),
    JoinClass("E2", True, True, False, False),
    JoinClass("F", False, True, False, False),
    JoinClass("G", True, False, False, True),
    JoinClass("H", False, False, False, True),
)


def enumerate_join_types():
    """Catalog name -> JoinClass for the nine two-pattern join classes."""
    return {c.name: c for c in JOIN_CLASSES}


def classify(jq):
    """(class name, mirrored) for a join query, or (None, False).

    ``mirrored`` is True when the query matches a class only after swapping
    its two patterns.
    """
    ls, rs = jq.slots
    lend, rend = (O if ls == S else S), (O if rs == S else S)
    flags = (jq.left[lend] is not None, jq.left[P] is not None,
             jq.right[P] is not None, jq.right[rend] is not None)
    for mirrored, key in ((False, flags), (True, flags[::-1])):
        for c in JOIN_CLASSES:
            if (c.left_end, c.left_pred, c.right_pred, c.right_end) == key:
                return c.name, mirrored
    return None, False
