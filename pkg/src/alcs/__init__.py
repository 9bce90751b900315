"""Cold-start active learning experiment engine for text classification.

Subpackages are imported explicitly (``from alcs import selection``); this
module stays import-light so the CLI can pin BLAS threading before numpy
loads.
"""

__version__ = "0.1.0"
