"""Heavy-tailed randomly weighted sums: tail models, asymptotic formulas and
Monte-Carlo verification."""
__version__ = "0.1.0"
