"""condcc: anyon condensation workbench for color codes and Floquet codes."""

__version__ = "0.1.0"
