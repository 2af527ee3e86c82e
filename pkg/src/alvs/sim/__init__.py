"""2-D multi-robot arena: kinematics, egocentric rendering, scenarios, trials."""
