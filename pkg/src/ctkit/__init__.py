"""ctkit: exact invariant computations for circuit topology.

Subpackages provide the symbolic substrate (symcalc), the tangle expression
language (tangle), the strand-merge invariant engine (gamma), its doubled
variant for hard contacts (dgamma), folded-chain diagram tools (gct), and a
move-invariance checker (verify).  The command line lives in ctkit.cli.
"""

__version__ = "0.1.0"
