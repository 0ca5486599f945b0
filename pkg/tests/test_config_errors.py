"""
Tests for environment settings and the error hierarchy.
"""

import logging

import pytest

from loopk.config import Settings, get_settings
from loopk.errors import (
    ComputationError,
    FoldingError,
    InputError,
    NonExactDivisionError,
    QWindowError,
    WindowError,
    describe,
)
from loopk.services.weyl_service import AlcovePoint, create_weyl_service


LOOPK_VARIABLES = ("LOOPK_MAX_ITER", "LOOPK_DEFAULT_Q_ORDER", "LOOPK_LOG_LEVEL", "LOOPK_MAX_WEYL_ORDER")


@pytest.fixture
def clean_env(monkeypatch):
    for name in LOOPK_VARIABLES:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults(clean_env):
    assert get_settings() == Settings()
    assert get_settings().logging_level == logging.WARNING


def test_environment_overrides(clean_env):
    clean_env.setenv("LOOPK_DEFAULT_Q_ORDER", "25")
    clean_env.setenv("LOOPK_LOG_LEVEL", "debug")
    settings = get_settings()
    assert settings.default_q_order == 25
    assert settings.logging_level == logging.DEBUG


@pytest.mark.parametrize("name,value", [
    ("LOOPK_MAX_ITER", "many"),
    ("LOOPK_MAX_ITER", "0"),
    ("LOOPK_DEFAULT_Q_ORDER", "-3"),
    ("LOOPK_LOG_LEVEL", "LOUD"),
])
def test_bad_settings(clean_env, name, value):
    clean_env.setenv(name, value)
    with pytest.raises(InputError):
        get_settings()


def test_iteration_cap_stops_folding(clean_env):
    clean_env.setenv("LOOPK_MAX_ITER", "3")
    weyl = create_weyl_service("su2")
    with pytest.raises(FoldingError):
        weyl.affine_fold(AlcovePoint.parse("1000.5"))


def test_error_families():
    assert issubclass(QWindowError, WindowError)
    assert issubclass(WindowError, InputError)
    assert issubclass(FoldingError, ComputationError)
    assert isinstance(InputError("x"), ValueError)


def test_describe():
    assert describe(QWindowError("too short")) == {"error": "q_window_error", "detail": "too short"}
    assert describe(RuntimeError("boom")) == {"error": "internal_error", "detail": "boom"}
    assert describe(InputError("bad"), detail="--point") == {"error": "input_error", "detail": "bad (--point)"}


def test_non_exact_division_carries_witness():
    error = NonExactDivisionError("no", quotient=1, remainder=2)
    assert (error.quotient, error.remainder) == (1, 2)
    assert error.to_dict()["error"] == "non_exact_division"


def test_services_resolve_lazily():
    import loopk.services as services
    from loopk.services.genus_service import GenusService

    assert services.GenusService is GenusService
    with pytest.raises(AttributeError):
        services.MissingService
