"""Built-in parameter sets for the standard theory and experiment curves.

Every constant is embedded here; presets never read external files.
"""
from typing import Callable, Dict, Union

from loguru import logger

from analysis.search import enhancement_bandwidth, optimal_transmissivity
from analysis.sweeps import baseline_series, sweep_frequency, sweep_transmissivity, transmissivity_grid
from shared.errors import UnknownPresetError
from shared.models import (
    DetectionParams,
    EnhancementReport,
    FeedbackParams,
    OpoParams,
    SpectrumSeries,
)

PresetResult = Dict[str, Union[SpectrumSeries, EnhancementReport]]

# Theory parameter set used for the T2 and frequency dependence curves
THEORY_OPO = OpoParams(T1=0.12, L1=5.0e-3, l=0.5, x=0.1)
THEORY_FEEDBACK = FeedbackParams(T2=1.0, L2=5.0e-2, la=0.25, lb=0.25)
THEORY_FREQUENCY_HZ = 1.0e6
THEORY_PUMP_STRENGTHS = (0.1, 0.35, 0.6)

# Experimental parameter set (single-frequency and T2-dependence measurements)
EXPERIMENT_OPO = OpoParams(T1=0.20, L1=6.5e-3, l=0.5, x=0.111)
EXPERIMENT_FEEDBACK = FeedbackParams(T2=0.8, L2=0.12, la=0.25, lb=0.25)
EXPERIMENT_FREQUENCY_HZ = 2.5e6
EXPERIMENT_DETECTION = DetectionParams(xi=0.985, rho=0.99)

# Broadband measurement: pump strength and intracavity loss drifted
BROADBAND_OPO = EXPERIMENT_OPO.model_copy(update={'x': 0.106, 'L1': 9.0e-3})

FREQUENCY_T2_VALUES = (0.7, 0.8, 0.9, 1.0)
F_MIN_HZ = 1.0e5
F_MAX_HZ = 8.0e6

# Resolution and tolerances are part of the preset, independent of CFSQ_* settings
PRESET_T2_GRID_POINTS = 101
PRESET_FREQUENCY_POINTS = 400
PRESET_OPTIMIZER_GRID_POINTS = 201
PRESET_OPTIMIZER_XTOL = 1e-6
PRESET_BANDWIDTH_STEPS = 2000
PRESET_BANDWIDTH_XTOL_HZ = 1e3

# Measured levels at 2.5 MHz in dB, +/- 0.15 dB
MEASURED_LEVELS_DB = {
    'measured.without_cf.squeezing_db': -1.64,
    'measured.without_cf.anti_squeezing_db': 1.52,
    'measured.with_cf.squeezing_db': -2.20,
    'measured.with_cf.anti_squeezing_db': 2.72,
    'measured.uncertainty_db': 0.15,
    'analyzer.rbw_hz': 30.0e3,
    'analyzer.vbw_hz': 300.0,
}


def _label(value: float) -> str:
    return f"{value:g}"


def _tag(series, preset: str, **extra):
    series.params_snapshot['preset'] = preset
    series.params_snapshot.update(extra)
    return series


def fig4() -> PresetResult:
    """S+/- versus T2 at 1 MHz for three pump strengths, with uncontrolled-OPO circles."""
    grid = transmissivity_grid(PRESET_T2_GRID_POINTS)
    results: PresetResult = {}
    for x in THEORY_PUMP_STRENGTHS:
        op = THEORY_OPO.model_copy(update={'x': x})
        name = f"fig4_x{_label(x)}"
        results[name] = _tag(sweep_transmissivity(op, THEORY_FEEDBACK, THEORY_FREQUENCY_HZ, grid), 'fig4')
        results[f"{name}_baseline"] = _tag(baseline_series(op, THEORY_FREQUENCY_HZ), 'fig4')
        results[f"{name}_optimum"] = optimal_transmissivity(
            op, THEORY_FEEDBACK, THEORY_FREQUENCY_HZ,
            grid_points=PRESET_OPTIMIZER_GRID_POINTS, xtol=PRESET_OPTIMIZER_XTOL,
        )
    return results


def fig5() -> PresetResult:
    """S+/- versus frequency for T2 in {0.7, 0.8, 0.9, 1.0}, theory parameters at x = 0.1."""
    results: PresetResult = {}
    for t2 in FREQUENCY_T2_VALUES:
        fb = THEORY_FEEDBACK.model_copy(update={'T2': t2})
        series = sweep_frequency(THEORY_OPO, fb, F_MIN_HZ, F_MAX_HZ, PRESET_FREQUENCY_POINTS)
        extra = {}
        if t2 < 1.0:
            extra['enhancement_bandwidth_hz'] = enhancement_bandwidth(
                THEORY_OPO, fb, F_MAX_HZ, steps=PRESET_BANDWIDTH_STEPS, xtol_hz=PRESET_BANDWIDTH_XTOL_HZ,
            )
        results[f"fig5_T2_{_label(t2)}"] = _tag(series, 'fig5', **extra)
    return results


def fig7b() -> PresetResult:
    """Detected S''+/- versus T2 at 2.5 MHz, plus the two measured operating points."""
    grid = transmissivity_grid(PRESET_T2_GRID_POINTS)
    detected = sweep_transmissivity(
        EXPERIMENT_OPO, EXPERIMENT_FEEDBACK, EXPERIMENT_FREQUENCY_HZ, grid, EXPERIMENT_DETECTION,
    )
    points = sweep_transmissivity(
        EXPERIMENT_OPO, EXPERIMENT_FEEDBACK, EXPERIMENT_FREQUENCY_HZ, [0.8, 1.0], EXPERIMENT_DETECTION,
    )
    return {
        'fig7b': _tag(detected, 'fig7b', **MEASURED_LEVELS_DB),
        'fig7b_measured_points': _tag(points, 'fig7b', **MEASURED_LEVELS_DB),
    }


def fig8() -> PresetResult:
    """Detected S''+/- versus frequency up to 8 MHz with the broadband parameters."""
    results: PresetResult = {}
    for t2 in FREQUENCY_T2_VALUES:
        fb = EXPERIMENT_FEEDBACK.model_copy(update={'T2': t2})
        series = sweep_frequency(
            BROADBAND_OPO, fb, F_MIN_HZ, F_MAX_HZ, PRESET_FREQUENCY_POINTS, det=EXPERIMENT_DETECTION,
        )
        results[f"fig8_T2_{_label(t2)}"] = _tag(series, 'fig8')
    return results


PRESETS: Dict[str, Callable[[], PresetResult]] = {
    'fig4': fig4,
    'fig5': fig5,
    'fig7b': fig7b,
    'fig8': fig8,
}


def run_preset(name: str) -> PresetResult:
    """Evaluate a named preset into named series and reports."""
    try:
        builder = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}")
    logger.info(f"Running preset {name}")
    results = builder()
    logger.info(f"Preset {name} produced {len(results)} outputs")
    return results
