"""Classification of {v, *, 1}-equations over commutative residuated
lattices, and-branching counter machines, and finite residuated frames."""

__version__ = "0.1.0"
