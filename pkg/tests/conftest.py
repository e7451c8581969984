"""Shared snapshot fixtures for the test suite."""

import pytest

from curvekit import ScenarioSpec, generate_scenario


@pytest.fixture(scope="session")
def flat_snapshot():
    """Noise-free flat market, 20 coupon bonds."""
    return generate_scenario(ScenarioSpec(regime="flat", n_bonds=20, seed=11))


@pytest.fixture(scope="session")
def falling_snapshot():
    """Noise-free falling market, 30 coupon bonds."""
    return generate_scenario(ScenarioSpec(regime="falling", n_bonds=30, seed=5))


@pytest.fixture(scope="session")
def zc_snapshot():
    """Zero-coupon bonds only, priced off flat 2% plus zero spread."""
    return generate_scenario(
        ScenarioSpec(
            regime="flat", n_bonds=12, coupon_range=(0.0, 0.0),
            spread_over_benchmark=0.0, base_rate=0.02, seed=3,
        )
    )
