"""Catalog, conjecture checkers and the random instance generator."""
