"""Requirements as contracted routines over a finite plant, verified by exhaustive execution."""

__version__ = "0.1.0"
