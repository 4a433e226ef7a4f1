"""Fake-news detection pipeline: credibility lists, linguistic model and OSN falsity propagation."""

__version__ = "0.1.0"
