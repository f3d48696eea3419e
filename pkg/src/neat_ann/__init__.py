"""Exact annihilators of neat even elements in exterior algebras."""

from .version import __version__  # noqa: F401
