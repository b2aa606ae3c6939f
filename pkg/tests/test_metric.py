import csv
import io
import json
import random
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest

from metric_forge import (
    CycleWitness,
    MatchedMetric,
    ProductChannelSpec,
    Semimetric,
    Space,
    UnorderedPair,
    band_metric,
    build_graph,
    expand_product,
    linear_extension,
    make_channel,
    score_from_channel,
    semimetric_from_extension,
    synthesize,
    triangle_violations,
    verify_compatibility,
)
from metric_forge.errors import DeltaOutOfRange, SemimetricError
from metric_forge.order import LinearExtension

P = UnorderedPair


def counterexample_extension():
    a, b, c = 0, 1, 2
    return LinearExtension.from_order(Space(3, ("a", "b", "c")), [P(a, c), P(b, c), P(a, b)])


class TestSemimetric:
    def test_from_extension(self):
        e = semimetric_from_extension(counterexample_extension())
        a, b, c = 0, 1, 2
        assert (e.values[a, c], e.values[b, c], e.values[a, b]) == (1, 2, 3)
        assert all(e.values[i, i] == 0 for i in range(3))

    def test_two_points(self):
        e = semimetric_from_extension(LinearExtension.from_order(Space(2), [P(0, 1)]))
        assert e.values.tolist() == [[0, 1], [1, 0]]

    def test_values_are_ranks(self):
        ext = linear_extension(build_graph(score_from_channel(
            expand_product(ProductChannelSpec(make_channel("BAC", "1/10", "1/5"), 3)))))
        e = semimetric_from_extension(ext)
        assert sorted(e.off_diagonal()) == list(range(1, 29))

    @pytest.mark.parametrize("rows", [
        [[0, 1], [2, 0]],
        [[1, 1], [1, 0]],
        [[0, 0], [0, 0]],
        [[0, 1, 1], [1, 0, 1]],
    ])
    def test_invalid(self, rows):
        with pytest.raises(SemimetricError):
            Semimetric(Space(len(rows)), rows)


class TestBandMetric:
    def test_counterexample_values(self):
        d = band_metric(semimetric_from_extension(counterexample_extension()), F(1, 4))
        a, b, c = 0, 1, 2
        assert (d.values[a, c], d.values[b, c], d.values[a, b]) == (F(3, 4), 1, F(5, 4))
        assert d.delta == F(1, 4) and d.is_exact

    def test_constant_collapse(self):
        e = Semimetric(Space(3), [[0, 7, 7], [7, 0, 7], [7, 7, 0]])
        for delta in (F(1, 8), F(1, 4), "33/100"):
            d = band_metric(e, delta)
            assert all(v == 1 for v in d.off_diagonal())

    @pytest.mark.parametrize("delta", [0, F(1, 3), F(1, 2), -F(1, 10), "x"])
    def test_delta_out_of_range(self, delta):
        e = semimetric_from_extension(counterexample_extension())
        with pytest.raises(DeltaOutOfRange):
            band_metric(e, delta)

    def test_triangle_slack(self, seed):
        rng = random.Random(seed)
        for _ in range(20):
            n = rng.randint(3, 9)
            rows = [[0] * n for _ in range(n)]
            for x in range(n):
                for y in range(x + 1, n):
                    rows[x][y] = rows[y][x] = F(rng.randint(1, 50), rng.randint(1, 5))
            delta = rng.choice([F(1, 8), F(1, 4), F(33, 100)])
            d = band_metric(Semimetric(Space(n), rows), delta)
            for x, y, z in product(range(n), repeat=3):
                if len({x, y, z}) == 3:
                    assert d.values[x, y] + d.values[y, z] >= 2 * (1 - delta) > F(4, 3) > 1 + delta >= d.values[x, z]

    def test_float_semimetric(self):
        e = Semimetric(Space(3), [[0, 0.5, 2.0], [0.5, 0, 1.25], [2.0, 1.25, 0]])
        d = band_metric(e, F(1, 4))
        assert not d.is_exact
        assert d.values[0, 1] == pytest.approx(0.75) and d.values[0, 2] == pytest.approx(1.25)

    def test_band_and_provenance_checked(self):
        ext = counterexample_extension()
        with pytest.raises(SemimetricError):
            MatchedMetric(Space(3), [[0, 2, 1], [2, 0, 1], [1, 1, 0]], F(1, 4))
        with pytest.raises(SemimetricError):
            MatchedMetric(ext.space, [[0, F(3, 4), 1], [F(3, 4), 0, F(5, 4)], [1, F(5, 4), 0]], F(1, 4), ext)


class TestSynthesize:
    def test_counterexample(self, counterexample):
        d = synthesize(counterexample, F(1, 4))
        a, b, c = 0, 1, 2
        assert isinstance(d, MatchedMetric)
        assert (d.values[a, c], d.values[b, c], d.values[a, b]) == (F(3, 4), 1, F(5, 4))
        assert not verify_compatibility(score_from_channel(counterexample), d)

    def test_bac_two_symbols(self):
        ch = expand_product(ProductChannelSpec(make_channel("BAC", "1/10", "1/5"), 2))
        d = synthesize(ch, F(1, 4))
        assert isinstance(d, MatchedMetric)
        assert not verify_compatibility(score_from_channel(ch), d)
        assert not triangle_violations(d.values)

    def test_rock_paper_scissors(self, rps_channel):
        w = synthesize(rps_channel)
        assert isinstance(w, CycleWitness) and len(w.pair_cycle) == 3

    def test_delta_propagates(self, counterexample):
        with pytest.raises(DeltaOutOfRange):
            synthesize(counterexample, F(1, 3))

    def test_off_diagonal_values_distinct(self):
        for m in (2, 3, 4):
            ch = expand_product(ProductChannelSpec(make_channel("BSC", "1/4"), m))
            d = synthesize(ch)
            vals = d.off_diagonal()
            assert len(set(vals)) == len(vals)
            for x in range(ch.size):
                row = [d.values[x, y] for y in range(ch.size) if y != x]
                assert row.count(min(row)) == 1

    def test_float_channel(self):
        ch = expand_product(ProductChannelSpec(make_channel("BAC", 0.1, 0.2), 3))
        d = synthesize(ch, 0.25)
        assert not d.is_exact
        assert not verify_compatibility(score_from_channel(ch), d)


class TestSerialization:
    def test_json_round_trip(self, counterexample):
        d = synthesize(counterexample)
        doc = json.loads(json.dumps(d.to_json()))
        assert doc["delta"] == "1/4"
        assert doc["matrix"][0] == ["0", "5/4", "3/4"]
        assert doc["provenance"] == [["a", "c"], ["b", "c"], ["a", "b"]]
        back = MatchedMetric.from_json(doc)
        assert back.values.tolist() == d.values.tolist()
        assert back.provenance.order == d.provenance.order

    def test_csv(self, counterexample):
        rows = list(csv.reader(io.StringIO(synthesize(counterexample).to_csv())))
        assert rows[0] == ["a", "b", "c"]
        assert rows[1] == ["0", "5/4", "3/4"]


class TestTriangleViolations:
    def test_detects_violation(self):
        bad = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=np.float64)
        assert (0, 1, 2) in triangle_violations(bad)

    def test_exact_detects_violation(self):
        bad = np.empty((3, 3), dtype=object)
        bad[:] = [[F(0), F(1, 3), F(1)], [F(1, 3), F(0), F(1, 3)], [F(1), F(1, 3), F(0)]]
        assert triangle_violations(bad) == [(0, 1, 2), (2, 1, 0)]

    def test_sampled_for_large_spaces(self):
        n = 80
        ok = np.ones((n, n)) - np.eye(n)
        assert triangle_violations(ok) == []
        ok[3, 4] = ok[4, 3] = 3.0
        assert triangle_violations(ok)
