"""Verifiers and measurement: compatibility, norms, convergence fits and tails."""
