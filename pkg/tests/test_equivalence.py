import math
import warnings

import numpy as np
import pytest

from anchova.core import InconsistencyError, QuadratureWarning
from anchova.decomp import anchored_norm, anova_norm
from anchova.equivalence import (
    measure_ratio,
    verify_bound_sweep,
    witness_function,
    witness_lower_bound_check,
    witness_norms_closed,
)
from anchova.tensor import TensorFunction
from anchova.weights import ExplicitWeights, ProductWeights, constant_cinf


class TestWitness:
    def test_one_dimension(self, rng):
        x = rng.random((20, 1))
        assert np.allclose(witness_function([2.0])(x), 1 + 2 * x[:, 0])

    def test_expansion(self, rng):
        x = rng.random((20, 2))
        f = witness_function([1.0, 1.0])
        assert len(f.terms) == 4
        assert np.allclose(f(x), 1 + x[:, 0] + x[:, 1] + x[:, 0] * x[:, 1])

    def test_empty(self):
        assert witness_function([]).constant_value() == 1.0

    def test_expanded_and_factored_agree(self, rng):
        g = [0.3, 1.2, 2.0]
        x = rng.random((30, 3))
        assert np.allclose(witness_function(g)(x), witness_function(g, expand=False)(x))

    def test_anchored_components_are_the_weights(self):
        from anchova.decomp import anchored_components

        g = [0.5, 2.0, 3.0]
        w = ProductWeights(tuple(g))
        comps = anchored_components(witness_function(g))
        for u in range(8):
            assert comps[u].constant_value() == pytest.approx(w.weight(u), rel=1e-14)


class TestClosedForms:
    def test_examples(self):
        assert witness_norms_closed([2.0], 1) == (2.0, 3.0)
        assert witness_norms_closed([1.0, 1.0], 2) == pytest.approx((2.0, 13 / 4), rel=1e-15)
        assert witness_norms_closed([1.0, 1.0], math.inf) == (1.0, 2.25)

    @pytest.mark.parametrize("p", [1, 2, 3, math.inf])
    def test_pipeline_matches_closed_form(self, p):
        for g in ([0.3], [1.0, 1.0, 1.0], [1 / j**2 for j in range(1, 8)]):
            w = ProductWeights(tuple(g))
            f = witness_function(g)
            anch, anova = witness_norms_closed(g, p)
            assert anchored_norm(f, w, p) == pytest.approx(anch, rel=1e-9)
            assert anova_norm(f, w, p) == pytest.approx(anova, rel=1e-9)

    def test_large_dimension_log_space(self):
        g = [1.0] * 200
        anch, anova = witness_norms_closed(g, 2)
        assert anch == pytest.approx(2.0**100)
        assert math.log(anova) == pytest.approx(100 * math.log(1 + 2.25), rel=1e-12)


class TestLowerBound:
    def test_equality_at_p1(self):
        r = witness_lower_bound_check([2.0], 1)
        assert (r.ratio_p, r.product_bound, r.holds) == (1.5, 1.5, True)

    def test_p2(self):
        r = witness_lower_bound_check([2.0], 2)
        assert (r.ratio_p, r.product_bound, r.holds) == (2.5, 1.5, True)

    def test_three_dimensions(self):
        r = witness_lower_bound_check([1.0, 1.0, 1.0], 1)
        # each factor is (1 + 3/2)/2 = 5/4 on both sides, so the chain is tight
        assert r.ratio_p == pytest.approx(1.25**3, rel=1e-14)
        assert r.product_bound == pytest.approx(1.25**3, rel=1e-14)
        assert r.holds


class TestMeasureRatio:
    def test_identity_function(self):
        r = measure_ratio(TensorFunction.monomial(1, {0: 1}), ProductWeights((1.0,)), 2)
        assert r.ratio_a_over_anch == pytest.approx(math.sqrt(1.25), rel=1e-14)
        assert r.bound_cdp == pytest.approx(math.sqrt(3), rel=1e-14)
        assert r.bound_satisfied

    @pytest.mark.parametrize("p", [1, 2, math.inf])
    def test_constant(self, p):
        r = measure_ratio(TensorFunction.constant(1.0, 2), ProductWeights((0.5, 0.5)), p)
        assert r.anchored_norm == r.anova_norm == 1.0
        assert r.ratio_a_over_anch == r.ratio_anch_over_a == 1.0

    def test_tight_at_infinity(self):
        r = measure_ratio(witness_function([1.0, 1.0]), ProductWeights((1.0, 1.0)), math.inf)
        assert r.ratio_a_over_anch == pytest.approx(2.25, rel=1e-12)
        assert r.ratio_a_over_anch == pytest.approx(constant_cinf(ProductWeights((1.0, 1.0))), rel=1e-12)
        assert r.bound_satisfied

    def test_reciprocal_ratios(self, random_function):
        w = ProductWeights((0.7, 1.3, 0.2))
        for _ in range(5):
            r = measure_ratio(random_function(3), w, 2)
            assert r.ratio_a_over_anch * r.ratio_anch_over_a == pytest.approx(1.0, rel=1e-14)

    def test_scaling_invariance(self, random_function):
        w = ProductWeights((0.7, 1.3, 0.2))
        f = random_function(3)
        for p in (1, 2, math.inf):
            r1, r2 = measure_ratio(f, w, p), measure_ratio(f * -3.7, w, p)
            assert r1.ratio_a_over_anch == pytest.approx(r2.ratio_a_over_anch, rel=1e-9)

    def test_zero_function(self):
        w = ExplicitWeights.from_mapping(1, {(): 1.0})
        f = TensorFunction.constant(0.0, 1)
        with pytest.raises(ValueError):
            measure_ratio(f, w, 2)

    def test_inconsistency_error_type(self, monkeypatch):
        import anchova.equivalence as eq

        calls = iter([0.0, 1.0])
        monkeypatch.setattr(eq, "weighted_norm", lambda *a, **k: next(calls))
        with pytest.raises(InconsistencyError):
            eq.measure_ratio(TensorFunction.constant(1.0, 1), ProductWeights((1.0,)), 2)


class TestSweep:
    def test_all_bounds_hold(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QuadratureWarning)
            res = verify_bound_sweep(ProductWeights((1.0, 0.5, 0.25)), [1, 2, 3, math.inf], 20, seed=3)
        assert len(res) == 80
        assert res.violations == []
        assert set(res.max_ratio) == {1.0, 2.0, 3.0, math.inf}
        # ordering: grouped by p, then by sample index
        assert [r.p for r in res.reports[:20]] == [1.0] * 20

    def test_empty(self):
        assert verify_bound_sweep(ProductWeights((1.0,)), [2], 0, seed=1).reports == []

    def test_deterministic(self, monkeypatch):
        w = ProductWeights((1.0, 1.0))
        a = verify_bound_sweep(w, [1.5, 2], 10, seed=11)
        monkeypatch.setenv("ANCHOVA_THREADS", "4")
        b = verify_bound_sweep(w, [1.5, 2], 10, seed=11)
        assert a.reports == b.reports
