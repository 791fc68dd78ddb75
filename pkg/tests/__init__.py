"""
Tests for the anomalous-decoherence package.

This package contains all the test cases for the simulations and experiments.
"""

# Make the test directory a Python package
