"""Assertions, weakest preconditions and verification conditions."""
