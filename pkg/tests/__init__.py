"""Tests for ProgMon."""
