"""
Pipeline package initialization.
"""
