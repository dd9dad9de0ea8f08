import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    import verdicts

    if verdicts.RECORDED:
        terminalreporter.section("acceptance criteria")
        for number in sorted(verdicts.RECORDED):
            terminalreporter.write_line(verdicts.RECORDED[number].line())
