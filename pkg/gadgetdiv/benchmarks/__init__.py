"""Bundled benchmark functions (IR files indexed by suite.csv)."""
