import numpy as np
import pytest

from analysis.search import baseline_squeezing, enhancement_bandwidth, optimal_transmissivity
from analysis.sweeps import sweep_transmissivity, transmissivity_grid
from physics.coherent_feedback import closed_loop_spectrum
from physics.opo_model import angular_frequency, open_loop_spectrum
from shared.errors import ThresholdError
from shared.models import Baseline, FeedbackParams, QuadratureSign

MINUS = QuadratureSign.MINUS


@pytest.mark.parametrize("x", [0.1, 0.35])
def test_weak_pump_improves_on_uncontrolled_opo(theory_opo, theory_feedback, x):
    op = theory_opo.model_copy(update={'x': x})
    report = optimal_transmissivity(op, theory_feedback, 1.0e6)
    assert report.improved
    assert report.improvement_db > 0
    assert 0 < report.t2_star < 1
    assert report.s_minus_at_star < report.baseline_s_minus
    assert report.improvement_db == pytest.approx(10 * np.log10(report.baseline_s_minus / report.s_minus_at_star))


def test_strong_pump_sets_no_improvement_flag(theory_opo, theory_feedback):
    report = optimal_transmissivity(theory_opo.model_copy(update={'x': 0.6}), theory_feedback, 1.0e6)
    assert not report.improved
    assert report.improvement_db == 0.0


@pytest.mark.parametrize("x", [0.0, 0.2, 0.5, 0.8])
def test_lossless_loop_never_reports_negative_improvement(theory_opo, x):
    fb = FeedbackParams(T2=1.0, L2=0.0, la=0.25, lb=0.25)
    report = optimal_transmissivity(theory_opo.model_copy(update={'x': x}), fb, 1.0e6)
    assert report.improvement_db >= 0


def test_refinement_never_worse_than_grid(theory_opo, theory_feedback):
    report = optimal_transmissivity(theory_opo, theory_feedback, 1.0e6)
    coarse = sweep_transmissivity(theory_opo, theory_feedback, 1.0e6, transmissivity_grid(201))
    coarse_min = min(p.s_minus for p in coarse.points if p.s_minus is not None)
    assert report.s_minus_at_star <= coarse_min + 1e-12


def test_baselines(theory_opo, theory_feedback):
    omega = angular_frequency(1.0e6)
    uncontrolled = open_loop_spectrum(theory_opo, omega, MINUS)
    assert baseline_squeezing(theory_opo, theory_feedback, omega, Baseline.UNCONTROLLED) == uncontrolled
    same_loss = baseline_squeezing(theory_opo, theory_feedback, omega, Baseline.SAME_LOSS)
    assert same_loss == pytest.approx(0.95 * uncontrolled + 0.05, rel=1e-12)

    report = optimal_transmissivity(theory_opo, theory_feedback, 1.0e6, baseline=Baseline.SAME_LOSS)
    assert report.baseline is Baseline.SAME_LOSS
    assert report.baseline_s_minus == pytest.approx(same_loss)


def test_optimizer_rejects_pump_above_open_loop_threshold(theory_opo, theory_feedback):
    with pytest.raises(ThresholdError):
        optimal_transmissivity(theory_opo.model_copy(update={'x': 1.0}), theory_feedback, 1.0e6)


def test_bandwidth_is_zero_without_feedback(theory_opo, theory_feedback):
    assert enhancement_bandwidth(theory_opo, theory_feedback, 8.0e6) == 0.0


def test_bandwidth_narrows_with_stronger_feedback(theory_opo, theory_feedback):
    bands = [
        enhancement_bandwidth(theory_opo, theory_feedback.model_copy(update={'T2': t2}), 2.0e7)
        for t2 in (0.7, 0.8, 0.9)
    ]
    assert 0 < bands[0] < bands[1] < bands[2] < 8.0e6


def test_bandwidth_is_a_crossover(theory_opo, theory_feedback):
    fb = theory_feedback.model_copy(update={'T2': 0.8})
    reference = theory_feedback
    f_band = enhancement_bandwidth(theory_opo, fb, 2.0e7)

    below = angular_frequency(0.9 * f_band)
    above = angular_frequency(1.1 * f_band)
    assert closed_loop_spectrum(theory_opo, fb, below, MINUS) < closed_loop_spectrum(theory_opo, reference, below, MINUS)
    assert closed_loop_spectrum(theory_opo, fb, above, MINUS) > closed_loop_spectrum(theory_opo, reference, above, MINUS)


@pytest.mark.parametrize("baseline", list(Baseline))
def test_optimizer_follows_the_squeezed_quadrature(theory_opo, theory_feedback, baseline):
    flipped = theory_opo.model_copy(update={'pump_sign': -1})
    report = optimal_transmissivity(theory_opo, theory_feedback, 1.0e6, baseline=baseline)
    mirrored = optimal_transmissivity(flipped, theory_feedback, 1.0e6, baseline=baseline)
    assert mirrored.improved is report.improved
    assert mirrored.t2_star == pytest.approx(report.t2_star, rel=1e-9)
    assert mirrored.s_minus_at_star == pytest.approx(report.s_minus_at_star, rel=1e-9)
    assert mirrored.baseline_s_minus == pytest.approx(report.baseline_s_minus, rel=1e-12)
    assert mirrored.improvement_db == pytest.approx(report.improvement_db, rel=1e-9, abs=1e-12)
    assert mirrored.s_minus_at_star < 1.0
    assert mirrored.params_snapshot['squeezed_quadrature'] == QuadratureSign.PLUS.value


def test_bandwidth_follows_the_squeezed_quadrature(theory_opo, theory_feedback):
    fb = theory_feedback.model_copy(update={'T2': 0.8})
    flipped = theory_opo.model_copy(update={'pump_sign': -1})
    f_band = enhancement_bandwidth(theory_opo, fb, 2.0e7)
    assert f_band > 0
    assert enhancement_bandwidth(flipped, fb, 2.0e7) == pytest.approx(f_band, abs=1.0e3)
