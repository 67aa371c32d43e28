import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hillproj as hp
from hillproj import norms
from hillproj import potential as pot
from hillproj import projector as prj
from conftest import power_iteration_norm

PI = math.pi
BC = hp.BoundaryCondition


class TestSpectralNorm:
    def test_zero_and_diagonal(self):
        assert norms.spectral_norm(np.zeros((4, 4))) == 0.0
        assert norms.spectral_norm(np.diag([3.0, 0, 0])) == 3.0

    def test_against_power_iteration(self):
        rng = np.random.default_rng(11)
        B = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        assert abs(norms.spectral_norm(B) - power_iteration_norm(B)) < 1e-10


class TestNormChain:
    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=1000))
    @settings(max_examples=40, deadline=None)
    def test_two_le_frob_le_abs_sum(self, dim, seed):
        rng = np.random.default_rng(seed)
        B = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        two = norms.spectral_norm(B)
        fro = np.linalg.norm(B, "fro")
        tot = np.abs(B).sum()
        assert two <= fro + 1e-12 and fro <= tot + 1e-12


class TestBariMarkus:
    def test_zero_sequence(self):
        rep = norms.bari_markus_partial([0.0] * 10)
        assert rep.total == 0.0 and rep.last_quarter_share == 0.0

    def test_one_over_n_matches_analytic(self):
        ts = [1.0 / n for n in range(1, 17)]
        rep = norms.bari_markus_partial(ts)
        total = sum(1.0 / n ** 2 for n in range(1, 17))
        tail = sum(1.0 / n ** 2 for n in range(13, 17))
        assert np.isclose(rep.last_quarter_share, tail / total)
        assert np.isclose(rep.partial_sums[-1], total)

    def test_too_few(self):
        with pytest.raises(norms.TooFewRecords):
            norms.bari_markus_partial([1.0] * 7)


class TestSynthesize:
    def test_constant_function(self):
        basis = hp.basis_for(BC.PER_PLUS, 8)
        f = norms.synthesize(basis, {0: 1.0}, M=2048)
        assert np.abs(f.values - 1.0).max() < 1e-12

    def test_dirichlet_unit(self):
        basis = hp.basis_for(BC.DIRICHLET, 8)
        f = norms.synthesize(basis, {3: 1.0}, M=2048)
        expect = math.sqrt(2) * np.sin(3 * f.xs)
        assert np.abs(f.values - expect).max() < 1e-12

    def test_parseval(self):
        basis = hp.basis_for(BC.PER_PLUS, 32)
        rng = np.random.default_rng(5)
        c = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
        f = norms.synthesize(basis, c, M=8192)
        _, l2, _ = norms.lp_norms(f)
        assert abs(l2 - math.sqrt(PI) * np.linalg.norm(c)) < 1e-6

    def test_vector_length_checked(self):
        basis = hp.basis_for(BC.PER_PLUS, 8)
        with pytest.raises(ValueError):
            norms.synthesize(basis, np.ones(3), M=2048)


class TestLpNorms:
    def test_constant(self):
        basis = hp.basis_for(BC.PER_PLUS, 8)
        f = norms.synthesize(basis, {0: 1.0}, M=8192)
        l1, l2, linf = norms.lp_norms(f)
        assert abs(l1 - PI) < 1e-10
        assert abs(l2 - math.sqrt(PI)) < 1e-10
        assert abs(linf - 1.0) < 1e-12

    def test_sine(self):
        f = norms.GridFunction(np.sin(np.linspace(0, PI, 8192)), 8192)
        l1, l2, linf = norms.lp_norms(f)
        assert abs(l1 - 2.0) < 1e-6
        assert abs(l2 - math.sqrt(PI / 2)) < 1e-6
        assert abs(linf - 1.0) < 1e-6

    @given(st.floats(min_value=0.01, max_value=50.0))
    @settings(max_examples=25, deadline=None)
    def test_homogeneity(self, c):
        vals = np.sin(np.linspace(0, PI, 1024)) + 0.3
        a = norms.lp_norms(norms.GridFunction(vals, 1024))
        b = norms.lp_norms(norms.GridFunction(c * vals, 1024))
        assert np.allclose(b, [c * x for x in a], rtol=1e-12)

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            norms.lp_norms(norms.GridFunction(np.ones(512), 512))


class TestDecayRecord:
    def test_zero_potential_record(self):
        H = hp.assemble(BC.PER_PLUS, pot.zero(), 40)
        pair = hp.riesz_projection(H, 8)
        rec = norms.decay_record(pair, pot.majorant(pot.zero()))
        assert rec.sum_abs_B < 1e-12 and rec.t_n < 1e-12
        assert rec.kappa_n == max(rec.rho_n, rec.eps_n)
        assert rec.bound64 == 64 * rec.kappa_n
        assert not rec.bound_valid  # eps floor keeps kappa above 1/4 here

    def test_chain_holds_on_real_data(self):
        p = pot.mathieu(1.0)
        H = hp.assemble(BC.PER_PLUS, p, 64)
        rec = norms.decay_record(hp.riesz_projection(H, 10), pot.majorant(p))
        assert rec.t_n <= rec.frob <= rec.sum_abs_B
        assert rec.l1_linf_bound == rec.sum_abs_B  # D = 1 for exponentials

    def test_dirichlet_sup_constant(self):
        sp = pot.SinePotential(0.0, {2: 1 / math.sqrt(2)}, 2, complete=True)
        H = hp.assemble(BC.DIRICHLET, sp, 48)
        rec = norms.decay_record(hp.riesz_projection(H, 8),
                                 pot.majorant_dir(sp))
        assert np.isclose(rec.l1_linf_bound, 2.0 * rec.sum_abs_B)  # D^2 = 2


class TestEquivalence:
    def test_free_periodic_within_three(self):
        H = hp.assemble(BC.PER_PLUS, pot.zero(), 48)
        pair = hp.riesz_projection(H, 8)
        rep = norms.equivalence_check(pair, samples=300, M=4096)
        assert rep.regime_ok and rep.passed
        assert rep.max_ratio <= 3.0 + 0.05

    def test_free_dirichlet_ratio_is_pi_over_two(self):
        # every element of the range is c sqrt(2) sin nx: the ratio
        # pi ||f||_inf / ||f||_1 equals pi/2 identically
        H = hp.assemble(BC.DIRICHLET, pot.zero(), 48)
        pair = hp.riesz_projection(H, 6)
        rep = norms.equivalence_check(pair, samples=50, M=8192)
        assert abs(rep.max_ratio - PI / 2) < 2e-3

    def test_regime_flag_reported_not_failed(self):
        # strong coupling pushes the deviation proxy above 1/2 at small n
        p = pot.mathieu(6.0)
        H = hp.assemble(BC.PER_PLUS, p, 64)
        pair = hp.riesz_projection(H, 8)
        rep = norms.equivalence_check(pair, samples=50, M=2048)
        assert not rep.regime_ok and rep.passed
        assert "proxy" in rep.note

    def test_determinism(self):
        H = hp.assemble(BC.PER_PLUS, pot.mathieu(1.0), 48)
        pair = hp.riesz_projection(H, 10)
        a = norms.equivalence_check(pair, samples=100, M=2048, seed=5)
        b = norms.equivalence_check(pair, samples=100, M=2048, seed=5)
        assert a.max_ratio == b.max_ratio


class TestBlockEquivalence:
    def test_zero_potential_dirichlet_kernel_scale(self):
        H = hp.assemble(BC.PER_PLUS, pot.zero(), 48)
        blk = prj.block_projection(H, 4, 10)
        rep = norms.sn_equivalence(blk, H.basis, samples=100, M=4096)
        assert rep.passed
        # the concentrated spike has ratio of order N, far below 50 N ln N
        assert 1.0 <= rep.max_ratio <= 50 * 10 * math.log(10) / 10


class TestSerialization:
    def test_csv_and_json(self):
        H = hp.assemble(BC.PER_PLUS, pot.mathieu(1.0), 48)
        r = pot.majorant(pot.mathieu(1.0))
        recs = [norms.decay_record(hp.riesz_projection(H, n), r) for n in (8, 10)]
        rows = norms.records_to_csv_rows(recs)
        assert rows[0] == norms.DECAY_CSV_COLUMNS
        assert len(rows) == 3 and rows[1][0] == 8
        import json
        payload = json.loads(norms.records_to_json(recs, meta={"bc": "per+"}))
        assert payload["meta"]["bc"] == "per+"
        assert payload["records"][0]["n"] == 8
