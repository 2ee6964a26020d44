"""Consistency and liveness checkers over finite histories."""
