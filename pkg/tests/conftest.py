# ABOUTME: Shared pytest fixtures: seeded construction instances, oracle handles and a CLI runner.
# ABOUTME: Instances are built from fixed seeds so every test sees the same keys on every run.

import pytest

from kle_workbench.cli import main
from kle_workbench.constructions import AccessModel, OracleHandle, build_instance
from kle_workbench.engine.ledger import CostLedger


@pytest.fixture()
def ledger():
    return CostLedger()


@pytest.fixture()
def make_instance():
    """Factory: make_instance(scheme, kappa, n, seed, **options)."""
    def _make(scheme, kappa=8, n=8, seed=1, **options):
        return build_instance(scheme, kappa, n, seed, **options)
    return _make


@pytest.fixture()
def make_handle(ledger):
    """Factory wrapping an instance in an oracle handle that charges the shared ledger."""
    def _make(instance, model=AccessModel.Q2):
        return OracleHandle(instance, model, ledger)
    return _make


@pytest.fixture()
def run_cli(capsys):
    """Runs the CLI in-process and returns (exit code, stdout, stderr)."""
    def _run(*argv):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return _run
