import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lorentz_mterm.spectral import Spectrum

settings.register_profile(
    "default", deadline=None, max_examples=60, derandomize=True, database=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_spec(rng, m, max_freq, n_modes, real=False):
    side = 2 * max_freq + 1
    flat = rng.choice(side**m, size=min(n_modes, side**m), replace=False)
    freqs = np.stack(np.unravel_index(flat, (side,) * m), axis=1) - max_freq
    c = rng.standard_normal(len(flat))
    if not real:
        c = c + 1j * rng.standard_normal(len(flat))
    return Spectrum.from_arrays(freqs, c, m)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



def pytest_terminal_summary(terminalreporter):
    # rows are attached by test_acceptance.py through record_property("acceptance", ...)
    rows = []
    for reports in terminalreporter.stats.values():
        for rep in reports:
            if getattr(rep, "when", None) == "call":
                rows += [v for k, v in getattr(rep, "user_properties", ()) if k == "acceptance"]
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(rows, key=lambda row: (int(re.match(r"\d+", row[0]).group()), row[0])):
        terminalreporter.write_line(f"criterion {crit:<3} {'PASS' if ok else 'FAIL'}  {detail}")
