import pytest

from lumicell.config import LumicellConfig, build_run_config, parse_config_text, parse_overrides
from lumicell.exceptions import ConfigParseError


def test_lumicell_config_from_env(monkeypatch):
    monkeypatch.setenv("LUMICELL_SEED", "7")
    monkeypatch.setenv("LUMICELL_THREADS", "3")
    monkeypatch.setenv("LUMICELL_OUTPUT_DIR", "/tmp/lumicell-runs")
    monkeypatch.setenv("LUMICELL_LOG_LEVEL", "debug")
    monkeypatch.setenv("ENABLE_MONITORING", "yes")
    monkeypatch.setenv("OTEL_ENDPOINT", "http://otel.local:4318")
    monkeypatch.setenv("LUMICELL_OTEL_SERVICE_NAME", "lumicell-ci")

    cfg = LumicellConfig.from_env()

    assert cfg.seed == 7
    assert cfg.threads == 3
    assert cfg.output_dir == "/tmp/lumicell-runs"
    assert cfg.log_level == "DEBUG"
    assert cfg.enable_monitoring is True
    assert cfg.otel_endpoint == "http://otel.local:4318"
    assert cfg.otel_service_name == "lumicell-ci"


def test_lumicell_config_validation_errors():
    with pytest.raises(ValueError):
        LumicellConfig(threads=0)
    with pytest.raises(ValueError):
        LumicellConfig(seed=-1)
    with pytest.raises(ValueError):
        LumicellConfig(output_dir="")
    with pytest.raises(ValueError):
        LumicellConfig(log_level="LOUD")


def test_parse_config_text_reads_sections_comments_and_types():
    text = """
    # стенд с пятью слотами
    run.seed = 42
    mac.n_slots=5
    mac.slot_list=5,10,15

    receiver.noise_sigma=0.02
    loc.light_off=no
    mac.mode=waveform
    """
    values = parse_config_text(text)
    assert values == {
        "seed": 42,
        "n_slots": 5,
        "slot_list": [5, 10, 15],
        "noise_sigma": 0.02,
        "light_off": False,
        "mode": "waveform",
    }


@pytest.mark.parametrize(
    "text, key",
    [
        ("mac.nslots=5", "mac.nslots"),
        ("mac.n_slots=5\nmac.n_slots=6", "mac.n_slots"),
        ("mac.n_slots=five", "mac.n_slots"),
        ("loc.light_off=maybe", "loc.light_off"),
    ],
)
def test_parse_config_text_names_offending_key(text, key):
    with pytest.raises(ConfigParseError) as exc_info:
        parse_config_text(text)
    assert exc_info.value.details["key"] == key
    assert key in str(exc_info.value)


def test_parse_config_text_rejects_line_without_equals():
    with pytest.raises(ConfigParseError) as exc_info:
        parse_config_text("run.seed 5")
    assert exc_info.value.details["line"] == 1


def test_build_run_config_precedence():
    env = LumicellConfig(seed=7, threads=2, output_dir="env-runs")
    file_layer = {"seed": 9, "n_slots": 10, "threads": 4}
    overrides = parse_overrides(["mac.n_slots=30"])
    flags = {"seed": 11, "outdir": None}

    cfg = build_run_config("success-rate", file_layer, overrides, flags, env=env)

    assert cfg.seed == 11
    assert cfg.n_slots == 30
    assert cfg.threads == 4
    assert cfg.outdir == "env-runs"
    assert cfg.output_path() == "env-runs/success-rate"


def test_build_run_config_reports_config_key_for_invalid_value():
    env = LumicellConfig()
    with pytest.raises(ConfigParseError) as exc_info:
        build_run_config("floor-sim", {"n_slots": 0}, env=env)
    assert exc_info.value.details["key"] == "mac.n_slots"


def test_build_run_config_rejects_unknown_subcommand():
    with pytest.raises(ConfigParseError):
        build_run_config("plot", env=LumicellConfig())
