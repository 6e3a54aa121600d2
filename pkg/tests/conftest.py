import warnings

import pytest
from hypothesis import HealthCheck, settings

from resfluor import SecularRegimeWarning

settings.register_profile("suite", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


@pytest.fixture(autouse=True)
def _quiet_secular_regime_warnings():
    # most tests run parameters chosen for coverage, not for the regime
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SecularRegimeWarning)
        yield


def line_triples(lines):
    """Sorted (center, half_width, weight) triples of a line collection."""
    return sorted((ln.center, ln.half_width, ln.weight) for ln in lines)


def assert_lines_equal(a, b, rtol=1e-12):
    ta, tb = line_triples(a), line_triples(b)
    assert len(ta) == len(tb), f"line counts differ: {len(ta)} vs {len(tb)}"
    for la, lb in zip(ta, tb):
        for va, vb in zip(la, lb):
            scale = max(abs(va), abs(vb), 1e-30)
            assert abs(va - vb) <= rtol * scale, f"{la} vs {lb}"
