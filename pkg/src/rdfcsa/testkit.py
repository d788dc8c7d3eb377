"""Dataset generators and brute-force oracles.

Nothing here touches the index structures: matching and joining are plain
scans over the retained triples, so they can serve as ground truth.
"""

import random
from dataclasses import dataclass

import numpy as np

from .dictionary import dict_build

SUBJECT, PREDICATE, OBJECT = 0, 1, 2


class InfeasibleSpec(ValueError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    """Target size, term-pool sizes, predicate skew in [0, 1) and seed."""

    n: int
    n_s: int
    n_p: int
    n_o: int
    skew: float = 0.0
    seed: int = 0


def predicate_weights(n_p, skew):
    """Zipf-like weights k^(-3*skew); skew 0 is uniform."""
    ks = np.arange(1, n_p + 1, dtype=float)
    w = ks ** (-3.0 * skew)
    return w / w.sum()


def _entity(i):
    return f"<http://example.org/e{i}>"


def gen_dataset(spec):
    """Seeded list of n distinct (s, p, o) term triples.

    Subjects are drawn from entities [0, n_s), objects from
    [n_s - k, n_s - k + n_o) with k = max(1, min(n_s, n_o) // 2) shared
    entities, so some terms can be both subject and object.
    """
    if min(spec.n, spec.n_s, spec.n_p, spec.n_o) < 1:
        raise InfeasibleSpec("all sizes must be >= 1")
    capacity = spec.n_s * spec.n_p * spec.n_o
    if spec.n > capacity:
        raise InfeasibleSpec(f"n={spec.n} exceeds n_s*n_p*n_o={capacity}")
    rng = random.Random(spec.seed)
    overlap = max(1, min(spec.n_s, spec.n_o) // 2)
    obj_base = spec.n_s - overlap
    weights = predicate_weights(spec.n_p, spec.skew).tolist()
    preds = list(range(spec.n_p))
    chosen = set()
    if spec.n * 2 > capacity:
        pool = [(s, p, o) for s in range(spec.n_s) for p in range(spec.n_p) for o in range(spec.n_o)]
        chosen = set(rng.sample(pool, spec.n))
    else:
        while len(chosen) < spec.n:
            p = rng.choices(preds, weights)[0]
            chosen.add((rng.randrange(spec.n_s), p, rng.randrange(spec.n_o)))
    triples = sorted(chosen)
    terms = [(_entity(s), f"<http://example.org/p{p}>", _entity(obj_base + o)) for s, p, o in triples]
    if spec.n_s >= 2 and spec.n_o >= 2:
        subjects = {t[0] for t in terms}
        if not subjects & {t[2] for t in terms}:
            # force a shared term: the last subject entity is also object 0..overlap
            shared = _entity(spec.n_s - 1)
            s, p, _ = terms[0]
            candidate = (shared, p, shared)
            if candidate not in set(terms):
                terms[0] = candidate
            else:
                terms[0] = (s, p, shared)
    rng.shuffle(terms)
    return terms


def gen_id_triples(spec):
    """Seeded distinct integer triples inside the declared id ranges."""
    rng = np.random.default_rng(spec.seed)
    if spec.n > spec.n_s * spec.n_p * spec.n_o:
        raise InfeasibleSpec("n exceeds n_s*n_p*n_o")
    w = predicate_weights(spec.n_p, spec.skew)
    seen = set()
    while len(seen) < spec.n:
        k = 2 * (spec.n - len(seen)) + 8
        batch = zip(rng.integers(1, spec.n_s + 1, k), rng.choice(spec.n_p, k, p=w) + 1,
                    rng.integers(1, spec.n_o + 1, k))
        for t in batch:
            seen.add(tuple(int(x) for x in t))
            if len(seen) == spec.n:
                break
    return sorted(seen)


# -- oracle ---------------------------------------------------------------------


class OracleStore:
    """Deduplicated id triples, optionally with the dictionary they came from."""

    def __init__(self, triples, dictionary=None):
        self.triples = sorted(set(tuple(int(x) for x in t) for t in triples))
        self.dictionary = dictionary
        self.array = np.array(self.triples, dtype=np.int64).reshape(-1, 3)

    @classmethod
    def from_terms(cls, raw_triples):
        d, ts = dict_build(raw_triples)
        return cls(ts.as_tuples(), d), d, ts


def oracle_match(store, pattern):
    """Every stored triple agreeing with the bound components, SPO-sorted."""
    keep = np.ones(len(store.triples), dtype=bool)
    for k in range(3):
        if pattern[k] is not None:
            keep &= store.array[:, k] == pattern[k]
    return [store.triples[i] for i in np.flatnonzero(keep)]


def oracle_match_naive(store, pattern):
    """Second, differently written matcher used to cross-check oracle_match."""
    out = []
    for t in store.triples:
        ok = True
        for k in range(3):
            if pattern[k] is not None and pattern[k] != t[k]:
                ok = False
        if ok:
            out.append(t)
    return out


_SLOTS = {"ss": (0, 0), "so": (2, 0), "oo": (2, 2)}


def oracle_join(store, left, right, kind):
    """Nested-loop join with the (x, left residual, right residual) semantics.

    For so joins backed by a dictionary, the object and subject values are
    compared as terms, not ids.
    """
    ls, rs = _SLOTS[kind]
    lres = [k for k in range(3) if k != ls and left[k] is None]
    rres = [k for k in range(3) if k != rs and right[k] is None]
    lrows = oracle_match(store, left)
    rrows = oracle_match(store, right)
    d = store.dictionary
    if kind == "so" and d is not None:
        lkey = [d.decode(a[ls], "O") for a in lrows]
        rkey = [d.decode(b[rs], "S") for b in rrows]
    else:
        lkey = [a[ls] for a in lrows]
        rkey = [b[rs] for b in rrows]
    out = set()
    for a, ka in zip(lrows, lkey):
        for b, kb in zip(rrows, rkey):
            if ka == kb:
                out.add((a[ls], tuple(a[k] for k in lres), tuple(b[k] for k in rres)))
    return sorted(out)


# -- query generators ------------------------------------------------------------


SHAPES = ("spo", "sp?", "s?o", "?po", "s??", "?p?", "??o", "???")


def random_pattern(rng, triples, alphabet, shape, miss_rate=0.1):
    """Pattern of the given shape, usually built from a stored triple."""
    t = rng.choice(triples)
    vals = [t[k] if shape[k] != "?" else None for k in range(3)]
    if rng.random() < miss_rate:
        bound = [k for k in range(3) if vals[k] is not None]
        if bound:
            k = rng.choice(bound)
            vals[k] = rng.randint(1, alphabet[k])
    return tuple(vals)


def random_join(rng, triples, join_class, kind, miss_rate=0.1):
    """JoinQuery of ``join_class`` whose constants come from a witness pair."""
    ls, rs = _SLOTS[kind]
    lend, rend = (2 if ls == 0 else 0), (2 if rs == 0 else 0)
    a = rng.choice(triples)
    partners = [b for b in triples if b[rs] == a[ls]]
    b = rng.choice(partners) if partners and rng.random() >= miss_rate else rng.choice(triples)
    return join_class.instantiate(kind, left_end=a[lend], left_pred=a[1],
                                  right_pred=b[1], right_end=b[rend])


# -- corpus ----------------------------------------------------------------------

CORPUS_SIZES = (1,) * 8 + (2,) * 8 + (10,) * 16 + (100,) * 26 + (1000,) * 30 + (10000,) * 12


def corpus_specs(count=100, seed=20240601, max_n=None):
    """Fixed list of DatasetSpecs spanning the default size mix."""
    rng = random.Random(seed)
    specs = []
    for k in range(count):
        n = CORPUS_SIZES[k % len(CORPUS_SIZES)]
        if max_n is not None:
            n = min(n, max_n)
        n_p = rng.choice((1, 2, 4, 8, 16, 32))
        side = max(2, int(round((n / n_p) ** 0.5 * rng.uniform(0.8, 2.5))) + 1)
        n_s = side
        n_o = max(2, int(side * rng.uniform(0.7, 2.0)))
        while n_s * n_p * n_o < n:
            n_o += 1
        skew = rng.choice((0.0, 0.3, 0.6, 0.9))
        specs.append(DatasetSpec(n, n_s, n_p, n_o, skew, seed + k))
    return specs
