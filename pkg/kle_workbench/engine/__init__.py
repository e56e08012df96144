# ABOUTME: Quantum execution engine: cost ledger, Grover backends, claw finding, cost model.
# ABOUTME: Submodules are imported directly; this package only groups them.
