"""Exact gamma factors of simple supercuspidals of split SO_2l twisted by
quadratic depth-zero characters of GL_1, with numeric oracles."""

__version__ = "0.1.0"
