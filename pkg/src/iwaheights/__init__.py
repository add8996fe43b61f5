"""iwaheights: exact Iwasawa-algebra arithmetic, height pairings, and
derived-height / L-function consistency checking over Z/p^k."""

__version__ = "0.1.0"
