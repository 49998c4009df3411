from __future__ import annotations

from hypothesis import HealthCheck, settings

# Property suites: at least 100 cases each, derandomized so every run draws the same examples.
settings.register_profile(
    "fixed",
    max_examples=120,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    print_blob=True,
)
settings.load_profile("fixed")
