"""Tests for quasidarwin."""
