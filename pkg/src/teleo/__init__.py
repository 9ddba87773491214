"""Teleo-reactive agent control: a rule language whose programs are
re-evaluated continuously, a hierarchical tick runtime with run-time
circuit construction, static regression/coverage checks, a threshold-net
compiler, and a deterministic 2-D bot world to drive it all."""

__version__ = "0.1.0"
