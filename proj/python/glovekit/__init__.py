"""GloVe embedding pipeline: vocabulary selection, cooccurrence counting,
seeded shuffling, AdaGrad training, evaluation, and WLS diagnostics."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
