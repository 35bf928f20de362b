"""
charvar - deformation invariants of representations of finitely presented groups
"""

__version__ = "1.0.0"
