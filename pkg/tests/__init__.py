"""Tests package for critspace."""
