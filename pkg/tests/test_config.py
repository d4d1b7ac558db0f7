import pytest

from kappanull.config import Settings

ENV_KEYS = ("KAPPANULL_RANK_RTOL", "KAPPANULL_SCAN_WORKERS", "KAPPANULL_LOG_LEVEL", "KAPPANULL_ODE_RTOL")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)


def test_defaults():
    settings = Settings()
    assert settings.rank_rtol == 1e-9
    assert settings.scan_threshold == 0.05
    assert settings.golden_width == 1e-10
    assert settings.escape_threshold == 1e8
    assert settings.scan_workers == 1
    assert settings.log_level == "INFO"


def test_environment_override(monkeypatch):
    monkeypatch.setenv("KAPPANULL_RANK_RTOL", "1e-7")
    monkeypatch.setenv("KAPPANULL_SCAN_WORKERS", "4")
    monkeypatch.setenv("KAPPANULL_LOG_LEVEL", "debug")
    settings = Settings()
    assert settings.rank_rtol == 1e-7
    assert settings.scan_workers == 4
    assert settings.log_level == "DEBUG"


@pytest.mark.parametrize(
    "key, value",
    [
        ("KAPPANULL_RANK_RTOL", "tiny"),
        ("KAPPANULL_ODE_RTOL", "-1e-10"),
        ("KAPPANULL_SCAN_WORKERS", "2.5"),
        ("KAPPANULL_LOG_LEVEL", "chatty"),
    ],
)
def test_invalid_values(monkeypatch, key, value):
    monkeypatch.setenv(key, value)
    with pytest.raises(ValueError, match=key):
        Settings()


class TestOverrides:
    def test_copy(self):
        base = Settings()
        tuned = base.with_overrides(rank_rtol=1e-6, scan_workers=None)
        assert tuned.rank_rtol == 1e-6
        assert tuned.scan_workers == base.scan_workers
        assert base.rank_rtol == 1e-9

    def test_unknown_field(self):
        with pytest.raises(ValueError):
            Settings().with_overrides(rank_tol=1e-6)

    def test_validated(self):
        with pytest.raises(ValueError):
            Settings().with_overrides(golden_width=0.0)
