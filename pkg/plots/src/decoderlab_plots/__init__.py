"""Batch figure rendering for decoderlab outputs.

A read-only consumer of the simulator's CSV and JSON files: it draws
threshold-crossing curves, parallel-runtime scaling, and the adversarial
chain layout, computing nothing beyond what the files contain.  Rendering is
deterministic: fixed style, no timestamps, identical inputs give identical
bytes.
"""

from .figures import SchemaError, plot_cantor, plot_runtime, plot_threshold

__all__ = ["SchemaError", "plot_cantor", "plot_runtime", "plot_threshold"]
__version__ = "0.1.0"
