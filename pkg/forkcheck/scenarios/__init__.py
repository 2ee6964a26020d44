"""Golden executions of the impossibility construction and their simulator configs."""
