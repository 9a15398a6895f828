"""Nevanlinna-Pick interpolation package."""
