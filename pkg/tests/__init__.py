"""
Unit tests initialization
"""
