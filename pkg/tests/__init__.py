"""Tests for the library."""
