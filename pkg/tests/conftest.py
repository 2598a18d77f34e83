from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    import test_acceptance as ta

    if ta.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ta.RESULTS):
            terminalreporter.write_line(ta.verdict_line(ta.RESULTS[k]))
