"""Secure downlink design for IRS-assisted MIMO under active pilot attacks."""

__version__ = "0.1.0"
