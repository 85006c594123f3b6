"""erc-toolkit: exact real computation with multivalued tests and Hoare-style verification."""

__version__ = "0.1.0"
