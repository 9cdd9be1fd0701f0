"""Exact tools for lifting conical junta degree through the pattern-matrix gadget.

Modules: `core` (functions, densities, juntas), `ratlp` (exact simplex),
`csp` (instances), `sa` (Sherali-Adams and conical junta degree),
`pattern` (gadget, pattern matrices, Acc), `decompose` (rectangle
decomposition), `lift` (factorizations and witnesses), `cli`.
"""

__version__ = "0.1.0"
