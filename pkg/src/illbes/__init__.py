"""Proof search, base-extension semantics and a completeness pipeline for intuitionistic linear logic."""
