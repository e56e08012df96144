# ABOUTME: Desk-scale workbench for quantum MITM and SITM attacks on key-length extensions.
# ABOUTME: Toy ciphers, keyed constructions, a Grover/claw engine, attacks and ground truth.

__version__ = "0.1.0"
