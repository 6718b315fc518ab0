"""
rslab: numerical laboratory for the replica-symmetric regime of the SK model.
"""

__version__ = "1.0.0"

__all__ = ["__version__"]
