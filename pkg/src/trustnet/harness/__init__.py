"""Desk-scale verification and operations tooling.

Fixture world generation, an independent brute-force status oracle, the
per-domain rate-adaptation simulator, canonicalization corpus checks, and
data seeding for a running service.
"""
