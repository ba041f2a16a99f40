import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramanujan_lab.ensembles import (
    EnsembleSpec,
    RegularGraph,
    build_bipartite,
    build_perm_model,
    sample_ensemble,
)
from ramanujan_lab.exceptions import SizeLimitError
from ramanujan_lab.spectra import (
    SpectralSummary,
    SpectralTransformer,
    adjacency_operator,
    cheeger_bruteforce,
    dense_adjacency,
    dense_spectrum,
    extremal_nontrivial,
    nontrivial_from_spectrum,
    ramanujan_check,
)


def k4():
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    return RegularGraph(4, 3, np.array(edges), "G")


def cycle(n):
    return build_perm_model(n, 2, [np.roll(np.arange(n), -1)])


def k33():
    idx = np.arange(3)
    return build_bipartite(6, 3, [idx, (idx + 1) % 3, (idx + 2) % 3])


class TestDense:
    def test_k4(self):
        np.testing.assert_allclose(dense_spectrum(k4()), [3, -1, -1, -1], atol=1e-12)

    def test_c8(self):
        expected = np.sort(2 * np.cos(2 * np.pi * np.arange(8) / 8))[::-1]
        np.testing.assert_allclose(dense_spectrum(cycle(8)), expected, atol=1e-12)

    def test_k33(self):
        np.testing.assert_allclose(dense_spectrum(k33()), [3, 0, 0, 0, 0, -3], atol=1e-12)

    def test_matvec_matches_dense(self):
        g, _ = sample_ensemble(EnsembleSpec("G", "none", 30, 4), 2)
        x = np.random.default_rng(0).standard_normal(30)
        np.testing.assert_allclose(adjacency_operator(g)(x), dense_adjacency(g) @ x, atol=1e-12)

    def test_size_limit(self):
        g = cycle(4002)
        with pytest.raises(SizeLimitError):
            dense_spectrum(g)


class TestExtremal:
    def test_k4(self):
        s = extremal_nontrivial(k4())
        assert s.lambda_plus == pytest.approx(-1, abs=1e-9)
        assert s.lambda_minus == pytest.approx(-1, abs=1e-9)
        assert s.lambda_abs == pytest.approx(1, abs=1e-9)
        assert s.is_ramanujan

    def test_c8_deflates_minus_two(self):
        s = extremal_nontrivial(cycle(8))
        assert s.lambda_plus == pytest.approx(math.sqrt(2), abs=1e-9)
        assert s.lambda_minus == pytest.approx(-math.sqrt(2), abs=1e-9)
        assert ramanujan_check(s, 2)

    def test_k33(self):
        s = extremal_nontrivial(k33())
        assert abs(s.lambda_plus) < 1e-9 and abs(s.lambda_minus) < 1e-9
        assert s.is_ramanujan

    def test_disconnected_rejected(self):
        idx = np.arange(3)
        with pytest.raises(ValueError):
            extremal_nontrivial(build_bipartite(6, 3, [idx, idx, idx]))

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            extremal_nontrivial(k4(), tol=0)

    def test_budget_exhaustion_marks_unconverged(self):
        g, _ = sample_ensemble(EnsembleSpec("I", "connected", 400, 3), 0)
        s = extremal_nontrivial(g, budget_factor=1)
        assert not s.converged and math.isnan(s.lambda_plus)

    @given(
        st.sampled_from(["B", "G", "H", "I"]),
        st.integers(3, 60),
        st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_dense_oracle(self, family, half, seed):
        d = 4 if family in "GH" else 3
        g, _ = sample_ensemble(EnsembleSpec(family, "connected", 2 * half, d), seed)
        eig = dense_spectrum(g)
        lp, lm = nontrivial_from_spectrum(eig, d)
        s = extremal_nontrivial(g)
        assert s.converged
        assert abs(s.lambda_plus - lp) < 1e-8
        assert abs(s.lambda_minus - lm) < 1e-8
        assert abs(eig[0] - d) < 1e-9
        assert s.lambda_plus < d and s.lambda_minus >= -d
        if family == "B":
            np.testing.assert_allclose(eig, -eig[::-1], atol=1e-8)
            assert abs(s.lambda_minus + s.lambda_plus) < 1e-8


class TestRamanujanCheck:
    def test_thresholds(self):
        assert ramanujan_check(SpectralSummary.from_extremes(2.8, -1.0, 3), 3)
        assert not ramanujan_check(SpectralSummary.from_extremes(2.9, -1.0, 3), 3)

    def test_unconverged(self):
        with pytest.raises(ValueError):
            ramanujan_check(SpectralSummary.failed(), 3)


class TestCheeger:
    def test_k4(self):
        r = cheeger_bruteforce(k4())
        assert r.h == 2 and len(r.witness_set) == 2 and r.holds

    def test_c4(self):
        r = cheeger_bruteforce(cycle(4))
        assert r.h == 1 and r.holds

    def test_disconnected(self):
        idx = np.arange(3)
        assert cheeger_bruteforce(build_bipartite(6, 3, [idx, idx, idx])).h == 0

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            cheeger_bruteforce(cycle(22))

    def test_bounds_on_samples(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            g, _ = sample_ensemble(EnsembleSpec("I", "connected", 10, 3), rng)
            assert cheeger_bruteforce(g).holds


def test_transformer():
    graphs = [sample_ensemble(EnsembleSpec("I", "connected", 20, 3), s)[0] for s in range(3)]
    est = SpectralTransformer(tol=1e-9)
    out = est.fit_transform(graphs)
    assert out.shape == (3, 5)
    assert est.get_params() == {"tol": 1e-9, "budget_factor": 300}
    assert list(est.get_feature_names_out())[0] == "lambda_plus"
