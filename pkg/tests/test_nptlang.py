"""Expression language: parsing, analytic means, densities, comparisons."""

import math

import numpy as np
import pytest

from riskbn.errors import (
    ArityError,
    DomainError,
    ExpressionSyntaxError,
    UnboundParentError,
    UnknownFunctionError,
)
from riskbn.nptlang import (
    DistCall,
    If,
    Num,
    eval_comparison,
    eval_density,
    eval_mean,
    expr_to_text,
    parse,
)


class TestParse:
    def test_exponential(self):
        expr = parse("Exponential(10)")
        assert expr == DistCall("exponential", (Num(10.0),))

    def test_case_insensitive_function_names(self):
        assert parse("EXPONENTIAL(10)") == parse("exponential(10)")

    def test_if_with_labels(self):
        expr = parse('if(fatal_risk <= 6.2e-5, "Acceptable", "Not Acceptable")')
        assert isinstance(expr, If)
        assert expr.op == "<="

    def test_unbalanced_parenthesis_position(self):
        text = "wmean(10, a, 4, b"
        with pytest.raises(ExpressionSyntaxError) as err:
            parse(text)
        assert err.value.position == 17

    def test_unknown_function(self):
        with pytest.raises(UnknownFunctionError):
            parse("Gamma(2, 3)")

    def test_arity(self):
        with pytest.raises(ArityError):
            parse("Exponential(10, 2)")

    def test_wmean_weight_must_be_positive(self):
        with pytest.raises(ExpressionSyntaxError):
            parse("wmean(0, a)")
        with pytest.raises(ExpressionSyntaxError):
            parse("wmean(-1, a)")

    def test_partition_duplicate_state(self):
        with pytest.raises(ExpressionSyntaxError):
            parse('partition(p){"A": 1, "A": 2}')

    def test_round_trip(self):
        texts = [
            "Exponential(10)",
            'partition(switch_off){"False": 0.2 * wrong_setting, "True": wrong_setting * 0.001}',
            'if(x <= 6.2e-05, "Acceptable", "Not Acceptable")',
            "wmean(10, a, 4, b, 3, c, 2, d, 1, e)",
            "TNormal(wmean(10, a, 4, b, 3, c, 2, d, 1, e), 0.001, 0, 1)",
            "Triangle(0.2 * h, h, 0.5 * h)",
        ]
        for text in texts:
            assert parse(expr_to_text(parse(text))) == parse(text)


class TestEvalMean:
    def test_exponential_untruncated_mean(self):
        assert eval_mean(parse("Exponential(10)"), {}) == pytest.approx(0.1)

    def test_wmean_of_identical_values(self):
        expr = parse("wmean(10, x, 4, x, 3, x, 2, x, 1, x)")
        for x in (0.0, 0.37, 1.0):
            assert eval_mean(expr, {"x": x}) == pytest.approx(x)

    def test_triangle_mean_matches_monte_carlo(self):
        # analytic (a+b+c)/3 against sampling the sorted-parameter triangle
        h = 0.004
        expr = parse("Triangle(0.2 * h, h, 0.5 * h)")
        analytic = eval_mean(expr, {"h": h})
        assert analytic == pytest.approx(h * (0.2 + 1 + 0.5) / 3)
        rng = np.random.default_rng(0)
        a, c, b = sorted((0.2 * h, h, 0.5 * h))
        u = rng.random(200_000)
        fc = (c - a) / (b - a)
        samples = np.where(
            u <= fc,
            a + np.sqrt(u * (b - a) * (c - a)),
            b - np.sqrt((1 - u) * (b - a) * (b - c)),
        )
        assert analytic == pytest.approx(samples.mean(), rel=2e-3)

    def test_rate_must_be_positive(self):
        with pytest.raises(DomainError):
            eval_mean(parse("Exponential(0)"), {})

    def test_unbound_parent(self):
        with pytest.raises(UnboundParentError):
            eval_mean(parse("0.2 * wrong_setting"), {})

    def test_tnormal_mean_is_truncated(self):
        # mean pulled toward the window centre when mu sits at the boundary
        mean = eval_mean(parse("TNormal(1.0, 0.001, 0, 1)"), {})
        assert mean < 1.0
        assert mean == pytest.approx(1.0 - math.sqrt(0.001) * math.sqrt(2 / math.pi), rel=1e-3)

    def test_binomial_requires_integer_n(self):
        with pytest.raises(DomainError):
            eval_mean(parse("Binomial(10.5, 0.2)"), {})


class TestEvalDensity:
    def test_uniform_on_four_bins(self):
        dist = eval_density(parse("Uniform(0, 1)"), {}, np.linspace(0, 1, 5))
        assert np.allclose(dist.masses, 0.25)

    def test_truncated_exponential_first_bin(self):
        dist = eval_density(parse("Exponential(10)"), {}, np.linspace(0, 1, 11))
        expected = (1 - math.exp(-1)) / (1 - math.exp(-10))
        assert dist.masses[0] == pytest.approx(expected, abs=1e-12)

    def test_binomial_pmf_against_log_factorial_oracle(self):
        n, p, k = 1000, 0.005, 5
        edges = np.arange(n + 2) - 0.5
        edges[0], edges[-1] = 0.0, float(n)
        dist = eval_density(parse(f"Binomial({n}, p)"), {"p": p}, edges)
        log_pmf = (
            math.lgamma(n + 1)
            - math.lgamma(k + 1)
            - math.lgamma(n - k + 1)
            + k * math.log(p)
            + (n - k) * math.log(1 - p)
        )
        assert dist.masses[k] == pytest.approx(math.exp(log_pmf), rel=1e-9)

    def test_masses_always_normalize(self):
        grids = [np.linspace(0, 1, n + 1) for n in (7, 32, 100)]
        exprs = [
            ("Exponential(10)", {}),
            ("Uniform(0.2, 0.4)", {}),
            ("TNormal(0.86, 0.01, 0, 1)", {}),
            ("Beta(6, 996)", {}),
            ("Triangle(0.1, 0.9, 0.4)", {}),
        ]
        for text, env in exprs:
            for edges in grids:
                dist = eval_density(parse(text), env, edges)
                assert dist.masses.sum() == pytest.approx(1.0, abs=1e-6)

    def test_refinement_consistency(self):
        # bisecting every bin leaves each coarse-bin mass unchanged
        coarse = np.linspace(0, 1, 17)
        fine = np.sort(
            np.concatenate([coarse, 0.5 * (coarse[:-1] + coarse[1:])])
        )
        for text in ("Exponential(10)", "Beta(6, 996)", "TNormal(0.5, 0.04, 0, 1)"):
            d_coarse = eval_density(parse(text), {}, coarse)
            d_fine = eval_density(parse(text), {}, fine)
            merged = d_fine.masses.reshape(-1, 2).sum(axis=1)
            assert np.allclose(merged, d_coarse.masses, atol=1e-9)

    def test_grid_mean_converges_to_eval_mean(self):
        # truncation-free cases: grid-weighted mean equals analytic mean
        for text in ("Uniform(0, 1)", "TNormal(0.5, 0.01, 0, 1)", "Beta(3, 14)"):
            expr = parse(text)
            target = eval_mean(expr, {})
            previous = None
            for bins in (32, 64, 128):
                dist = eval_density(expr, {}, np.linspace(0, 1, bins + 1))
                diff = abs(dist.mean - target)
                assert diff <= 1.0 / bins
                if previous is not None:
                    assert diff <= previous + 1e-12
                previous = diff

    def test_point_mass_for_deterministic(self):
        dist = eval_density(parse("0.2 * x"), {"x": 0.25}, np.linspace(0, 1, 65))
        assert dist.point == pytest.approx(0.05)
        assert dist.mean == pytest.approx(0.05)
        assert dist.masses.sum() == pytest.approx(1.0)
        assert np.count_nonzero(dist.masses) == 1


class TestComparison:
    def test_below_threshold(self):
        expr = parse('if(risk <= 6.2e-5, "Acceptable", "Not Acceptable")')
        assert eval_comparison(expr, {"risk": 2.0e-5}) == "Acceptable"

    def test_boundary_inclusive(self):
        expr = parse('if(risk <= 6.2e-5, "Acceptable", "Not Acceptable")')
        assert eval_comparison(expr, {"risk": 6.2e-5}) == "Acceptable"

    def test_above_threshold(self):
        expr = parse('if(risk <= 6.2e-5, "Acceptable", "Not Acceptable")')
        assert eval_comparison(expr, {"risk": 1.1e-3}) == "Not Acceptable"

    def test_unbound(self):
        expr = parse('if(risk <= 6.2e-5, "Acceptable", "Not Acceptable")')
        with pytest.raises(UnboundParentError):
            eval_comparison(expr, {})


class TestProperties:
    def test_wmean_scale_equivariance(self):
        expr = parse("wmean(10, a, 4, b, 3, c)")
        base = {"a": 0.2, "b": 0.5, "c": 0.9}
        for c in (0.1, 2.0, 7.5):
            scaled = {k: c * v for k, v in base.items()}
            assert eval_mean(expr, scaled) == pytest.approx(
                c * eval_mean(expr, base)
            )

    def test_partition_identical_branches(self):
        part = parse('partition(p){"False": Exponential(10), "True": Exponential(10)}')
        bare = parse("Exponential(10)")
        edges = np.linspace(0, 1, 33)
        for state in ("False", "True"):
            d1 = eval_density(part, {}, edges, states={"p": state})
            d2 = eval_density(bare, {}, edges)
            assert np.allclose(d1.masses, d2.masses)
