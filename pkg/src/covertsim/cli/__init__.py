"""covertsim CLI sub-command implementations."""
