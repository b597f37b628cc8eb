"""Tests for KD quasiprobabilities, TPM probabilities, modification terms and measures."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from quasidarwin.core.exceptions import DimensionError, InvalidSettingError, NotProjectorError
from quasidarwin.core.kdq import (
    KDDistribution,
    MeasurementSetting,
    ModificationTerms,
    analyze,
    basis_projector,
    benchmark_setting,
    bloch_state,
    bloch_vector,
    embed_projector,
    infer_benchmark_setting,
    kd_distribution,
    kd_time_series,
    measure_values,
    measures,
    modification_terms,
    nonselective_state,
    phase_adjusted,
    qubit_state,
    rank_one_projector,
    tpm_distribution,
)
from quasidarwin.core.model import ModelParams, heisenberg_project
from quasidarwin.core.numerics import PAULI_Y, DenseOperator, StateVector, commutator_norm
from quasidarwin.core.sweep import setting_for


class TestSingleQubitHelpers:
    """Tests for state labels, Bloch vectors and projectors."""

    @pytest.mark.parametrize(
        "label,vector",
        [("0", (0, 0, 1)), ("1", (0, 0, -1)), ("+", (1, 0, 0)), ("-", (-1, 0, 0)), ("+i", (0, 1, 0)), ("-i", (0, -1, 0))],
    )
    def test_labels_and_bloch_vectors(self, label: str, vector: tuple[int, int, int]) -> None:
        """Test that state labels and Bloch vectors describe the same states."""
        state = qubit_state(label)
        assert np.allclose(bloch_vector(state), vector)
        assert abs(np.vdot(bloch_state(vector).amplitudes, state.amplitudes)) == pytest.approx(1.0)

    def test_unknown_label(self) -> None:
        """Test that an unknown state label is rejected."""
        with pytest.raises(InvalidSettingError):
            qubit_state("2")

    def test_zero_bloch_vector(self) -> None:
        """Test that the zero Bloch vector is rejected."""
        with pytest.raises(InvalidSettingError):
            bloch_state((0, 0, 0))

    def test_basis_projector_outcomes(self) -> None:
        """Test that the two outcomes of a basis are its eigenprojectors."""
        assert np.allclose(basis_projector("Y", 0).entries, 0.5 * (np.eye(2) + PAULI_Y))
        assert np.allclose(basis_projector("Y", 1).entries, 0.5 * (np.eye(2) - PAULI_Y))

    def test_embed_projector_rejects_rank_two(self) -> None:
        """Test that embedding needs a rank-one projector."""
        with pytest.raises(NotProjectorError):
            embed_projector(DenseOperator.from_matrix(np.eye(2), hermitian=True), 1, 3)

    def test_embed_projector_rejects_bad_site(self) -> None:
        """Test that embedding rejects a site outside the model."""
        with pytest.raises(DimensionError):
            embed_projector(basis_projector("Z"), 3, 3)


class TestMeasurementSetting:
    """Tests for MeasurementSetting validation."""

    def test_benchmark_setting(self) -> None:
        """Test the projectors, sites and initial state of the benchmark setting."""
        setting = benchmark_setting(3.66)
        assert setting.time_a == 3.66
        assert setting.site_a == 1 and setting.site_b == 2
        assert np.allclose(setting.a0.entries, np.diag([1, 0]))
        assert np.allclose(setting.b0.entries, rank_one_projector(qubit_state("+i")).entries)
        assert np.allclose(setting.initial_state.amplitudes, StateVector.basis("000").amplitudes)

    def test_rejects_same_sites(self) -> None:
        """Test that A and B must be measured on different sites."""
        with pytest.raises(ValidationError):
            MeasurementSetting.from_bases("Z", "Y", site_a=1, site_b=1)

    def test_rejects_system_site(self) -> None:
        """Test that the system qubit cannot be measured."""
        with pytest.raises(ValidationError):
            MeasurementSetting.from_bases("Z", "Y", site_a=0, site_b=2)

    def test_rejects_non_projector(self) -> None:
        """Test that a non-projector A_0 is rejected."""
        with pytest.raises(ValidationError):
            MeasurementSetting(
                a0=DenseOperator.from_matrix(0.5 * np.eye(2), hermitian=True),
                b0=basis_projector("Z"),
                initial_factors=tuple(qubit_state("0") for _ in range(3)),
            )

    def test_rejects_negative_time(self) -> None:
        """Test that negative times are rejected."""
        with pytest.raises(ValidationError):
            MeasurementSetting.from_bases("Z", "Y", time_a=-1.0)

    def test_qubit_mismatch(self) -> None:
        """Test that a setting sized for another model is rejected."""
        setting = MeasurementSetting.from_bases("Z", "Y", initial="0000")
        with pytest.raises(InvalidSettingError):
            kd_distribution(setting, ModelParams())

    def test_with_time_copies(self) -> None:
        """Test that with_time returns a copy and leaves the original alone."""
        setting = benchmark_setting()
        later = setting.with_time(2.0)
        assert setting.time_a == 0.0
        assert later.time_a == 2.0


class TestRecords:
    """Tests for distribution record validation."""

    def test_kd_sum_checked(self) -> None:
        """Test that KD tables must sum to one."""
        with pytest.raises(ValidationError, match="sum"):
            KDDistribution(q=np.full((2, 2), 0.3))

    def test_kd_marginals_checked(self) -> None:
        """Test that KD tables must have real marginals."""
        q = np.array([[0.25 + 0.1j, 0.25], [0.25, 0.25 - 0.1j]])
        with pytest.raises(ValidationError, match="marginals"):
            KDDistribution(q=q)

    def test_classical_detection(self) -> None:
        """Test that negative entries mark a table as non-classical."""
        assert KDDistribution(q=np.full((2, 2), 0.25)).is_classical()
        assert not KDDistribution(q=np.array([[0.5, -0.1], [0.1, 0.5]])).is_classical()


class TestBenchmarkValues:
    """Theory values of N_AS for the benchmark setting."""

    @pytest.mark.parametrize("tau,expected", [(2.21, 0.554), (3.66, 0.988)])
    def test_reference_n_as(self, bench_params: ModelParams, tau: float, expected: float) -> None:
        """Test the reference N_AS values of the benchmark setting."""
        report = analyze(benchmark_setting(tau), bench_params).report
        assert report.n_as == pytest.approx(expected, abs=0.002)

    def test_zero_at_initial_time(self, bench_params: ModelParams) -> None:
        """Test that the benchmark setting is classical at τ = 0."""
        analysis = analyze(benchmark_setting(0.0), bench_params)
        assert abs(analysis.report.n_as) <= 1e-10
        assert analysis.kd.is_classical()
        assert analysis.terms.max_abs <= 1e-10

    def test_inference_selects_z_y(self, bench_params: ModelParams) -> None:
        """Test that only the Z/Y basis pair reproduces the reference values."""
        result = infer_benchmark_setting(bench_params)
        assert len(result.rows) == 9
        assert result.matched
        assert (result.best.basis_a, result.best.basis_b) == ("Z", "Y")
        others = [r for r in result.rows if (r.basis_a, r.basis_b) != ("Z", "Y")]
        assert all(r.error > result.tolerance for r in others)

    def test_local_maximum_near_peak(self, bench_params: ModelParams) -> None:
        """Test that N_AS peaks within one grid step of τ = 3.66."""
        taus = np.round(np.arange(3.36, 3.96 + 1e-9, 0.05), 10)
        q, _ = kd_time_series(benchmark_setting(), bench_params, taus)
        values = measure_values(q, None, "N_AS")
        assert abs(taus[int(np.argmax(values))] - 3.66) <= 0.05 + 1e-9


class TestModificationTerms:
    """Tests for the correction terms and their building blocks."""

    def test_phase_adjusted_projector(self) -> None:
        """Test that rotating |+><+| about |0><0| gives |-i><-i|."""
        a = basis_projector("Z")
        b = basis_projector("X")
        rotated = phase_adjusted(b, a)
        assert np.allclose(rotated.entries, 0.5 * (np.eye(2) - PAULI_Y))

    def test_nonselective_state_is_block_diagonal(self) -> None:
        """Test that a non-selective measurement removes coherences."""
        rho = nonselective_state(qubit_state("+"), basis_projector("Z"))
        assert np.allclose(rho.entries, np.diag([0.5, 0.5]))

    def test_nonselective_rejects_non_projector(self) -> None:
        """Test that a non-selective measurement needs a projector."""
        with pytest.raises(NotProjectorError):
            nonselective_state(qubit_state("+"), DenseOperator.from_matrix(0.5 * np.eye(2), hermitian=True))

    def test_nonselective_state_independent_of_outcome(self, bench_params: ModelParams) -> None:
        """Test that both outcomes of A give the same non-selective state."""
        setting = benchmark_setting(2.21)
        a0 = DenseOperator(entries=np.kron(np.kron(np.eye(2), np.diag([1.0, 0.0])), np.eye(2)), n_qubits=3, hermitian=True)
        a1 = a0.model_copy(update={"entries": np.eye(8) - a0.entries})
        rho0 = nonselective_state(setting.initial_state, heisenberg_project(a0, bench_params, 2.21))
        rho1 = nonselective_state(setting.initial_state, heisenberg_project(a1, bench_params, 2.21))
        assert np.allclose(rho0.entries, rho1.entries, atol=1e-12)

    def test_reconstruction_on_benchmark(self, bench_params: ModelParams) -> None:
        """Test that q equals p plus the correction terms on the benchmark."""
        setting = benchmark_setting(3.66)
        q = kd_distribution(setting, bench_params).q
        terms = modification_terms(setting, bench_params)
        assert np.allclose(terms.reconstruct(tpm_distribution(setting, bench_params)), q, atol=1e-10)

    def test_commuting_operators_give_vanishing_terms(self, darwinistic_params: ModelParams) -> None:
        """Test that the correction terms vanish in the Darwinistic model."""
        terms = modification_terms(benchmark_setting(5.0), darwinistic_params)
        assert terms.max_abs <= 1e-10

    def test_reconstruct_adds_parts(self) -> None:
        """Test that reconstruction adds the real and imaginary terms to p."""
        terms = ModificationTerms(real_term=np.full((2, 2), 0.1), imag_term=np.full((2, 2), -0.2))
        tpm = tpm_distribution(benchmark_setting(), ModelParams())
        assert np.allclose(terms.reconstruct(tpm) - tpm.p, 0.1 - 0.2j)


def _random_instance(k: int) -> tuple[MeasurementSetting, ModelParams]:
    rng = np.random.default_rng(k)
    omega = 0.0 if k % 2 == 0 else float(rng.uniform(0.1, 3.0))
    params = ModelParams(omega=omega)
    return setting_for(2024, params, k).with_time(float(rng.uniform(0.5, 20.0))), params


class TestKdTpmIdentities:
    """Properties of random settings, split between Darwinistic and generic models."""

    def test_terms_vanish_iff_operators_commute(self) -> None:
        """Test that the correction terms vanish exactly when A(τ) and B commute."""
        agreements = 0
        for k in range(1000):
            setting, params = _random_instance(k)
            terms = modification_terms(setting, params)
            n = setting.n_qubits
            a_t = [
                heisenberg_project(embed_projector(DenseOperator.from_matrix(a, hermitian=True), setting.site_a, n), params, setting.time_a)
                for a in setting.projectors_a
            ]
            b = [embed_projector(DenseOperator.from_matrix(m, hermitian=True), setting.site_b, n) for m in setting.projectors_b]
            commute = max(commutator_norm(x, y) for x in a_t for y in b) <= 1e-10
            vanish = terms.max_abs <= 1e-10
            assert commute == vanish, f"instance {k}"
            agreements += commute
        # half of the instances are Darwinistic
        assert agreements == 500

    def test_kd_equals_tpm_plus_terms(self) -> None:
        """Test that q equals p plus the correction terms on random instances."""
        for k in range(1000):
            setting, params = _random_instance(k)
            analysis = analyze(setting, params)
            assert np.allclose(analysis.terms.reconstruct(analysis.tpm), analysis.kd.q, rtol=0, atol=1e-10)

    def test_structural_identities(self) -> None:
        """Test the normalisation, marginals and measure identities on random instances."""
        for k in range(1000):
            setting, params = _random_instance(k)
            analysis = analyze(setting, params)
            q, report = analysis.kd.q, analysis.report
            assert abs(q.sum() - 1) <= 1e-10
            assert np.all(np.abs(q.sum(axis=0).imag) <= 1e-10)
            assert np.all(np.abs(q.sum(axis=1).imag) <= 1e-10)
            # summing over B outcomes gives <A_i(τ)>, which the TPM table shares
            assert np.allclose(analysis.kd.row_marginals, analysis.tpm.p.sum(axis=1), atol=1e-10)
            assert np.all(analysis.kd.column_marginals >= -1e-10)
            assert np.all(analysis.kd.column_marginals <= 1 + 1e-10)
            assert report.n_as_im == pytest.approx(4 * report.n_inf_im, abs=1e-10)
            negativity = float(np.sum(np.maximum(0.0, -q.real)))
            assert report.n_as_re == pytest.approx(2 * negativity, abs=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(tau=st.floats(min_value=0.0, max_value=20.0), seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_time_series_matches_pointwise(self, tau: float, seed: int) -> None:
        """Test that the vectorised time series matches pointwise evaluation."""
        params = ModelParams(omega=1.5)
        setting = setting_for(seed, params, 0)
        q, p = kd_time_series(setting, params, np.array([tau]))
        timed = setting.with_time(tau)
        assert np.allclose(q[0], kd_distribution(timed, params).q, atol=1e-10)
        assert np.allclose(p[0], tpm_distribution(timed, params).p, atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(tau=st.floats(min_value=0.0, max_value=20.0), seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_vectorised_measures_match_report(self, tau: float, seed: int) -> None:
        """Test that the vectorised measures match the scalar report."""
        params = ModelParams(omega=0.8)
        setting = setting_for(seed, params, 3).with_time(tau)
        analysis = analyze(setting, params)
        q, p = analysis.kd.q[None], analysis.tpm.p[None]
        assert measure_values(q, p, "N_AS")[0] == pytest.approx(analysis.report.n_as, abs=1e-12)
        assert measure_values(q, p, "N_INF")[0] == pytest.approx(analysis.report.n_inf, abs=1e-12)
        assert measure_values(q, p, "N_H")[0] == pytest.approx(analysis.report.n_h, abs=1e-10)


class TestMeasures:
    """Tests for the non-classicality measures."""

    def test_classical_distribution_scores_zero(self) -> None:
        """Test that a classical table scores zero on every measure."""
        kd = KDDistribution(q=np.array([[0.1, 0.2], [0.3, 0.4]]))
        terms = ModificationTerms(real_term=np.zeros((2, 2)), imag_term=np.zeros((2, 2)))
        report = measures(kd, terms)
        assert report.n_as == pytest.approx(0.0, abs=1e-15)
        assert report.n_inf == 0.0
        assert report.n_h == 0.0

    def test_negative_and_imaginary_parts(self) -> None:
        """Test the real and imaginary parts of each measure."""
        q = np.array([[0.6 + 0.1j, -0.1 - 0.1j], [0.2 - 0.1j, 0.3 + 0.1j]])
        report = measures(KDDistribution(q=q), ModificationTerms(real_term=np.zeros((2, 2)), imag_term=np.zeros((2, 2))))
        assert report.n_as_re == pytest.approx(0.2)
        assert report.n_as_im == pytest.approx(0.4)
        assert report.n_inf_re == pytest.approx(0.1)
        assert report.n_inf_im == pytest.approx(0.1)
        assert report.value("N_AS") == pytest.approx(0.6)

    def test_n_h_needs_tpm(self) -> None:
        """Test that N_H needs the TPM table."""
        with pytest.raises(ValueError):
            measure_values(np.full((1, 2, 2), 0.25), None, "N_H")
