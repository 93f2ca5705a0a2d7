"""Open-loop OPO and closed-loop coherent-feedback physics."""
