# Unit Tests Package
# File: __init__.py
# Author: GitHub Copilot
# Date: 2025-07-11
# Purpose: Unit tests package initialization

"""
Unit tests for Enterprise Insights Copilot components.

This package contains unit tests that test individual components
in isolation with mocked dependencies.
"""
