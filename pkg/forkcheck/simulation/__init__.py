"""Deterministic simulator of clients, FIFO channels and a register server."""
