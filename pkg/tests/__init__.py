"""Test suite for covertsim."""
