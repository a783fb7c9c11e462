"""Exact arithmetic for differential operators in characteristic p."""
