import pytest

from cli.config_file import REQUIRED_KEYS, load_config, parse_config
from shared.errors import ConfigParseError, ConfigValidationError
from shared.models import Baseline, Command, OutputFormat, Spacing


def test_minimal_theory_config(fig4_config_text):
    run = parse_config(fig4_config_text)
    assert run.opo.T1 == 0.12
    assert run.opo.L1 == 5.0e-3
    assert run.opo.l == 0.5
    assert run.feedback.L2 == 5.0e-2
    assert run.feedback.la == run.feedback.lb == 0.25
    # defaults are recorded explicitly
    assert run.opo.x == 0.0
    assert run.opo.pump_sign == 1
    assert run.feedback.T2 == 1.0
    assert run.feedback.carrier_phase == -1.0
    assert run.detection is None
    assert run.command is Command.THRESHOLD
    assert run.output.format is OutputFormat.CSV


def test_full_config(fig4_config_text):
    text = fig4_config_text + """
x = 0.1
T2 = 0.8   # inline comment
xi = 0.985
rho = 0.99
command = sweep-freq
f_min_hz = 1e5
f_max_hz = 8e6
spacing = log
output_path = "out/freq.json"
output_format = json
"""
    run = parse_config(text)
    assert run.opo.x == 0.1
    assert run.feedback.T2 == 0.8
    assert run.detection.eta == pytest.approx(0.961, abs=5e-4)
    assert run.command is Command.SWEEP_FREQ
    assert run.command_args.n_points == 400
    assert run.command_args.spacing is Spacing.LOG
    assert run.output.path == "out/freq.json"
    assert run.output.format is OutputFormat.JSON


def test_out_of_range_value_names_field_and_bound(fig4_config_text):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(fig4_config_text + "T2 = 1.5\n")
    message = str(info.value)
    assert "T2" in message
    assert "(0, 1]" in message
    assert info.value.field == "T2"
    assert info.value.exit_code == 1


def test_empty_document_lists_required_keys():
    with pytest.raises(ConfigValidationError) as info:
        parse_config("")
    for key in REQUIRED_KEYS:
        assert key in str(info.value)


def test_unknown_key_reports_line(fig4_config_text):
    with pytest.raises(ConfigParseError) as info:
        parse_config(fig4_config_text + "gain = 3\n")
    assert info.value.line == 8
    assert "gain" in str(info.value)
    assert str(info.value).startswith("line 8:")


def test_malformed_line_reports_line():
    with pytest.raises(ConfigParseError) as info:
        parse_config("T1 = 0.12\nL1 0.005\n")
    assert info.value.line == 2


def test_duplicate_key(fig4_config_text):
    with pytest.raises(ConfigParseError) as info:
        parse_config(fig4_config_text + "T1 = 0.2\n")
    assert "duplicate" in str(info.value)


def test_key_without_value(fig4_config_text):
    with pytest.raises(ConfigParseError):
        parse_config(fig4_config_text + "x\n")


def test_detection_needs_both_factors(fig4_config_text):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(fig4_config_text + "xi = 0.9\n")
    assert info.value.field == "rho"


def test_command_arguments_are_required(fig4_config_text):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(fig4_config_text + "command = sweep-t2\n")
    assert info.value.field == "frequency_hz"
    with pytest.raises(ConfigValidationError) as info:
        parse_config(fig4_config_text + "command = sweep-freq\nf_min_hz = 1e5\n")
    assert info.value.field == "f_max_hz"
    with pytest.raises(ConfigValidationError):
        parse_config(fig4_config_text + "command = sweep-freq\nf_min_hz = 2e6\nf_max_hz = 1e6\n")


def test_unknown_command(fig4_config_text):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(fig4_config_text + "command = plot\n")
    assert info.value.field == "command"


def test_overrides_replace_document_values(fig4_config_text):
    run = parse_config(fig4_config_text + "x = 0.2\n", {
        'command': 'sweep-t2', 'frequency_hz': 1.0e6, 'x': None, 'baseline': 'same-loss',
    })
    assert run.opo.x == 0.2
    assert run.command is Command.SWEEP_T2
    assert run.command_args.frequency_hz == 1.0e6
    assert run.command_args.grid_points == 101
    assert run.command_args.baseline is Baseline.SAME_LOSS


def test_negative_pump_sign(fig4_config_text):
    assert parse_config(fig4_config_text + "pump_sign = -1\n").opo.pump_sign == -1
    with pytest.raises(ConfigValidationError):
        parse_config(fig4_config_text + "pump_sign = 2\n")


def test_pump_above_threshold_is_not_a_config_error(fig4_config_text):
    assert parse_config(fig4_config_text + "x = 1.2\n").opo.x == 1.2


def test_snapshot_lists_every_field_once(fig4_config_text):
    snapshot = parse_config(fig4_config_text).snapshot()
    for key in ("opo.T1", "opo.x", "feedback.T2", "feedback.carrier_phase", "detection", "command",
                "command_args.frequency_hz", "command_args.preset", "output.path", "output.format"):
        assert key in snapshot


def test_default_format_from_settings(fig4_config_text, monkeypatch):
    from shared.config import reset_settings
    monkeypatch.setenv("CFSQ_DEFAULT_FORMAT", "json")
    reset_settings()
    assert parse_config(fig4_config_text).output.format is OutputFormat.JSON


def test_load_config(write_config, fig4_config_text):
    assert load_config(write_config(fig4_config_text)).opo.T1 == 0.12
    with pytest.raises(ConfigParseError):
        load_config(write_config(fig4_config_text).parent / "missing.cfg")


@pytest.mark.parametrize("line,field", [
    ("l = inf", "l"),
    ("la = inf", "la"),
    ("x = nan", "x"),
])
def test_non_finite_values_are_rejected(fig4_config_text, line, field):
    text = fig4_config_text.replace(f"{field} = ", f"#{field} = ") + line + "\n"
    with pytest.raises(ConfigValidationError) as info:
        parse_config(text)
    assert info.value.field == field
    assert info.value.exit_code == 1


def test_non_finite_frequency_is_rejected(fig4_config_text):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(fig4_config_text + "command = spectrum\nfrequency_hz = inf\n")
    assert info.value.field == "frequency_hz"


def test_unparsable_number_is_not_reported_as_a_bound(fig4_config_text):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(fig4_config_text + "x = abc\n")
    assert info.value.field == "x"
    assert "outside" not in str(info.value)
