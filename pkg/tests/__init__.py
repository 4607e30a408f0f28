"""Tests for mutforge."""
