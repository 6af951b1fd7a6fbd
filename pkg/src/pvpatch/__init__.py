"""Differential torsor patching over a formal diamond of fields."""

__version__ = "0.1.0"
SCHEMA = "pvpatch/1"
