"""Tests for DCA Alerts."""
