"""Linear-time streaming maximization of monotone submodular functions under a cardinality constraint."""
