"""Events, operations, histories and the SWMR register specification."""
