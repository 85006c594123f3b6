"""Example programs with exact-rational oracles."""
