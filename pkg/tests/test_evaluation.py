import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnsl.dag import Dag
from bnsl.evaluation import (
    ContextResult,
    EvaluationError,
    GoldStandard,
    auroc,
    evaluate_context,
    load_gold,
    mean_rank,
    node_confidence,
    save_gold,
)


def brute_auroc(scores, positive):
    """Pairwise comparison: wins + half ties over all (pos, neg) pairs."""
    pos = [s for s, p in zip(scores, positive) if p]
    neg = [s for s, p in zip(scores, positive) if not p]
    total = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a, b in itertools.product(pos, neg))
    return total / (len(pos) * len(neg))


GOLD = GoldStandard("I", {"A": True, "B": True, "C": False, "D": False})


class TestAuroc:
    def test_half(self):
        conf = {"A": 1.0, "B": 0.0, "C": 1.0, "D": 0.0}
        assert auroc(conf, GOLD) == 0.5

    def test_perfect(self):
        assert auroc({"A": 1.0, "B": 1.0, "C": 0.0, "D": 0.0}, GOLD) == 1.0

    def test_ties(self):
        assert auroc(dict.fromkeys("ABCD", 0.3), GOLD) == 0.5

    def test_missing_confidence(self):
        with pytest.raises(EvaluationError):
            auroc({"A": 1.0}, GOLD)

    def test_degenerate_gold(self):
        with pytest.raises(EvaluationError):
            GoldStandard("I", {"A": True, "B": True})

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 5), st.booleans()), min_size=2, max_size=30))
    def test_brute_force(self, rows):
        labels = [p for _, p in rows]
        if all(labels) or not any(labels):
            return
        gold = GoldStandard("I", {f"n{k}": p for k, (_, p) in enumerate(rows)})
        conf = {f"n{k}": float(s) for k, (s, _) in enumerate(rows)}
        assert auroc(conf, gold) == pytest.approx(brute_auroc([s for s, _ in rows], labels), abs=1e-12)

    def test_monotone_invariance_and_flip(self):
        rng = np.random.default_rng(0)
        names = [f"n{k}" for k in range(20)]
        labels = {k: bool(rng.random() < 0.4) for k in names}
        labels["n0"], labels["n1"] = True, False
        gold = GoldStandard("I", labels)
        flipped = GoldStandard("I", {k: not v for k, v in labels.items()})
        conf = {k: float(rng.random()) for k in names}
        a = auroc(conf, gold)
        assert auroc({k: np.exp(3 * v) for k, v in conf.items()}, gold) == pytest.approx(a, abs=1e-12)
        assert auroc(conf, flipped) == pytest.approx(1 - a, abs=1e-12)


class TestConfidence:
    def test_fractions(self):
        labels = ["I", "A", "B"]
        nets = [Dag.from_edges(3, [(0, 1)] + ([(0, 2)] if k < 3 else []), labels) for k in range(4)]
        conf = node_confidence(nets, 0)
        assert conf == {"A": 1.0, "B": 0.75}
        nets = [Dag(3, labels)] * 4
        assert node_confidence(nets, 0) == {"A": 0.0, "B": 0.0}

    def test_empty(self):
        with pytest.raises(EvaluationError):
            node_confidence([], 0)


class TestContext:
    labels = ["I", "A", "B", "C", "D"]

    def test_true_network(self):
        dag = Dag.from_edges(5, [(0, 1), (1, 2), (3, 4)], self.labels)
        assert evaluate_context([dag], GOLD).auroc == 1.0

    def test_empty_network(self):
        assert evaluate_context([Dag(5, self.labels)], GOLD).auroc == 0.5

    def test_unknown_intervention(self):
        with pytest.raises(EvaluationError):
            evaluate_context([Dag(2, ["A", "B"])], GOLD)


class TestMeanRank:
    def test_single(self):
        res = [ContextResult("c", "m1", 0.7), ContextResult("c", "m2", 0.5)]
        assert mean_rank(res) == {"m1": 1.0, "m2": 2.0}

    def test_swapped(self):
        res = [
            ContextResult("c1", "m1", 0.7), ContextResult("c1", "m2", 0.5),
            ContextResult("c2", "m1", 0.4), ContextResult("c2", "m2", 0.6),
        ]
        assert mean_rank(res) == {"m1": 1.5, "m2": 1.5}

    def test_tie(self):
        res = [ContextResult("c", "m1", 0.5), ContextResult("c", "m2", 0.5)]
        assert mean_rank(res) == {"m1": 1.5, "m2": 1.5}

    def test_missing_cell(self):
        res = [ContextResult("c1", "m1", 0.5), ContextResult("c1", "m2", 0.4),
               ContextResult("c2", "m1", 0.3)]
        with pytest.raises(EvaluationError):
            mean_rank(res)

    def test_monotone_transform(self):
        rng = np.random.default_rng(3)
        res = [ContextResult(f"c{c}", f"m{m}", float(rng.random())) for c in range(5) for m in range(6)]
        squashed = [ContextResult(r.context, r.method, r.auroc ** 3) for r in res]
        assert mean_rank(res) == mean_rank(squashed)


def test_gold_round_trip(tmp_path):
    save_gold(GOLD, tmp_path / "g.txt")
    assert (tmp_path / "g.txt").read_text().splitlines()[0] == "intervention:I"
    assert load_gold(tmp_path / "g.txt") == GOLD


def test_gold_parse_error(tmp_path):
    (tmp_path / "g.txt").write_text("intervention:I\nA,2\n")
    with pytest.raises(EvaluationError, match=":2"):
        load_gold(tmp_path / "g.txt")


def single_point(pred, gold):
    tpr = len(pred & set(gold.positives)) / len(gold.positives)
    fpr = len(pred & set(gold.negatives)) / len(gold.negatives)
    return (1 + tpr - fpr) / 2


@pytest.mark.parametrize("pred,expected", [({"C", "D"}, 0.0), ({"A", "C"}, 0.5), ({"A", "B"}, 1.0)])
def test_binary_cases(pred, expected):
    conf = {k: float(k in pred) for k in "ABCD"}
    assert auroc(conf, GOLD) == expected == single_point(pred, GOLD)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=2, max_size=25))
def test_binary_matches_operating_point(rows):
    if all(p for _, p in rows) or not any(p for _, p in rows):
        return
    gold = GoldStandard("I", {f"n{k}": p for k, (_, p) in enumerate(rows)})
    pred = {f"n{k}" for k, (hit, _) in enumerate(rows) if hit}
    conf = {f"n{k}": float(hit) for k, (hit, _) in enumerate(rows)}
    assert auroc(conf, gold) == pytest.approx(single_point(pred, gold), abs=1e-15)
