"""Black-box adversarial rewriting of C-like code against vulnerability classifiers."""

__version__ = "0.1.0"
