import pytest
from mpmath import mp

from stirling_asym.special import DEFAULT_DIGITS


@pytest.fixture(autouse=True)
def _fixed_precision():
    # mpmath's context is global; every test starts from the default.
    with mp.workdps(DEFAULT_DIGITS):
        yield
