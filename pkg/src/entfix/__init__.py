"""entfix: named-entity correction for ASR transcripts.

Pipeline: detect corrupted entity spans in the top hypothesis, retrieve
phonetically similar catalog entities, rerank them with description-based
semantic scores, fuse both signals, and gate replacements against the
n-best acoustic evidence.
"""

from entfix.kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
