"""Hybrid magic-state distillation: maps, planner and Monte Carlo studies."""
