"""Test suite for Reppy Worker."""

