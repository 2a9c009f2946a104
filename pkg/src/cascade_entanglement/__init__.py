"""Driven cascade-atom two-mode entanglement: closed forms, moments, Fock oracle."""
