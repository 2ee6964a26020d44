"""forkcheck - sequential and fork-sequential consistency checking for register histories."""
