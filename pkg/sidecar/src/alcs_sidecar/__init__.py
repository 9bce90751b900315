"""Embedding sidecar: fine-tune a transformer checkpoint and emit DVEC files.

Runs as its own process, driven entirely by a JSON request manifest. The
only coupling to the experiment engine is the file contract: the request
schema, the ``.done`` reply, and the DVEC matrix format.
"""

__version__ = "0.1.0"
