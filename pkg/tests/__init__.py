# ABOUTME: Test package for kle_workbench.
# ABOUTME: Uses pytest with real seeded instances and no mocking; monkeypatch only touches config.
