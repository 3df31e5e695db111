"""
Unit tests for every hatsdetect sub-package.
"""
