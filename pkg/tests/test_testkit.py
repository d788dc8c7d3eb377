import random
from collections import Counter

import pytest

from rdfcsa.dictionary import dict_build
from rdfcsa.join import JOIN_CLASSES
from rdfcsa.testkit import (CORPUS_SIZES, SHAPES, DatasetSpec, InfeasibleSpec, OracleStore,
                            corpus_specs, gen_dataset, gen_id_triples, oracle_join,
                            oracle_match, oracle_match_naive, random_join, random_pattern)


def test_single_triple_spec():
    assert len(gen_dataset(DatasetSpec(1, 1, 1, 1))) == 1


def test_deterministic_under_seed():
    spec = DatasetSpec(500, 30, 5, 40, 0.4, 77)
    assert gen_dataset(spec) == gen_dataset(spec)
    assert gen_dataset(spec) != gen_dataset(DatasetSpec(500, 30, 5, 40, 0.4, 78))
    assert gen_id_triples(spec) == gen_id_triples(spec)


def test_infeasible_spec():
    with pytest.raises(InfeasibleSpec):
        gen_dataset(DatasetSpec(9, 2, 2, 2))
    with pytest.raises(InfeasibleSpec):
        gen_dataset(DatasetSpec(1, 0, 1, 1))


def test_skew_concentrates_predicates():
    terms = gen_dataset(DatasetSpec(10000, 400, 16, 600, 0.9, 5))
    top = Counter(t[1] for t in terms).most_common(1)[0][1]
    assert top / len(terms) >= 0.5


def test_so_term_guaranteed():
    for seed in range(30):
        terms = gen_dataset(DatasetSpec(3, 2, 1, 2, 0.0, seed))
        assert {t[0] for t in terms} & {t[2] for t in terms}
        assert len(set(terms)) == 3


def test_dual_oracles_agree():
    rng = random.Random(2)
    _, ts = dict_build(gen_dataset(DatasetSpec(300, 20, 4, 25, 0.5, 9)))
    store = OracleStore(ts.as_tuples())
    assert oracle_match(store, (None, None, None)) == store.triples
    for shape in SHAPES:
        for _ in range(40):
            tp = random_pattern(rng, store.triples, (ts.n_s, ts.n_p, ts.n_o), shape, 0.3)
            assert oracle_match(store, tp) == oracle_match_naive(store, tp)
    t = store.triples[5]
    assert oracle_match(store, t) == [t]


def test_oracle_join_empty_when_predicates_never_meet():
    store = OracleStore([(1, 1, 2), (3, 2, 4)])
    a = JOIN_CLASSES[0].instantiate("so", left_end=1, left_pred=1, right_pred=2, right_end=4)
    assert oracle_join(store, a.left, a.right, "so") == []


def test_random_join_prefers_witnesses():
    rng = random.Random(0)
    store = OracleStore([(1, 1, 2), (2, 2, 1)])
    jq = random_join(rng, store.triples, JOIN_CLASSES[0], "so", miss_rate=0.0)
    assert oracle_join(store, jq.left, jq.right, "so")


def test_corpus_specs_mix():
    specs = corpus_specs()
    assert len(specs) == 100
    assert sorted({s.n for s in specs}) == [1, 2, 10, 100, 1000, 10000]
    assert len(CORPUS_SIZES) == 100 and corpus_specs() == specs
    assert max(s.n for s in corpus_specs(200, max_n=300)) == 300
