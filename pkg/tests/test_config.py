import pytest

from hapticad.config import Config, ConfigError, dump_config, parse_config


def test_defaults():
    cfg = parse_config("")
    assert cfg == Config()
    assert cfg.calibration.slope == 86.2 and cfg.vertex_count == 64
    assert cfg.train.seed == 42


def test_overrides_and_comments():
    cfg = parse_config(
        """
        # scan settings
        scan.vertex_count = 16
        scan.close_seam = no   # open band
        train.grid = 5x5x9
        train.validation_grid = 4, 4, 8
        seed = 7
        """
    )
    assert cfg.vertex_count == 16 and cfg.close_seam is False
    assert cfg.grid == (5, 5, 9) and cfg.validation_grid == (4, 4, 8)
    assert cfg.seed == 7 and cfg.train.seed == 7


def test_dump_round_trip():
    cfg = parse_config("calibration.intercept = 2.5\ncontrol.ki = 0.1\ntrain.epochs = 10\n")
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize(
    "text,needle",
    [
        ("scan.vertex_cuont = 3", "unknown key"),
        ("seed 4", "key = value"),
        ("train.grid = 3 3", "three counts"),
        ("scan.close_seam = maybe", "boolean"),
        ("scan.vertex_count = 2", "vertex_count"),
        ("calibration.slope = 0", "line 1"),
    ],
)
def test_errors(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(text)
