"""Tests for the qmt_emu package."""
