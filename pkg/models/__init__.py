"""
Models package initialization.
"""
