"""Kernel backend selection.

Two interchangeable kernel sets exist: ``pure`` (numpy/BLAS) and
``_fastcore`` (Cython), with availability decided at import time.  The
default "auto" mode routes each call by batch size using crossovers measured
in benchmarks/bench_backends.py: the compiled kernels win the sequential
regime (chain stepping, walkback) where per-call overhead dominates, while
BLAS wins large batched matmuls.  Set BASKETDAE_BACKEND=pure|compiled to
force a single implementation.
"""

import os

from . import pure

try:
    from . import _fastcore
except ImportError:
    _fastcore = None

# Measured on x86-64 at p=10, N=100; see benchmarks/bench_backends.py.
FORWARD_BACKWARD_CUTOVER = 8
CROSS_ENTROPY_CUTOVER = 128


def available_backends():
    names = ["pure"]
    if _fastcore is not None:
        names.append("compiled")
    return names


def get_backend(name="auto"):
    """Return a single kernel module by name ("auto" prefers compiled)."""
    if name == "auto":
        return _fastcore if _fastcore is not None else pure
    if name == "pure":
        return pure
    if name == "compiled":
        if _fastcore is None:
            raise ImportError(
                "compiled kernels requested but the _fastcore extension "
                "is not built (run: pip install -e . or python setup.py build_ext --inplace)"
            )
        return _fastcore
    raise ValueError(f"unknown backend {name!r}; expected auto, pure or compiled")


_mode = os.environ.get("BASKETDAE_BACKEND", "auto")

if _mode in ("pure", "compiled") or (_mode == "auto" and _fastcore is None):
    _single = get_backend(_mode if _mode != "auto" else "pure")
    BACKEND_NAME = _single.NAME
    forward_batch = _single.forward_batch
    backward_batch = _single.backward_batch
    cross_entropy_sum = _single.cross_entropy_sum
    adam_update = _single.adam_update
elif _mode == "auto":
    BACKEND_NAME = "hybrid"

    def forward_batch(w_in, b_in, w_out, b_out, xt):
        be = _fastcore if xt.shape[0] <= FORWARD_BACKWARD_CUTOVER else pure
        return be.forward_batch(w_in, b_in, w_out, b_out, xt)

    def backward_batch(w_out, xt, h, y, x):
        be = _fastcore if xt.shape[0] <= FORWARD_BACKWARD_CUTOVER else pure
        return be.backward_batch(w_out, xt, h, y, x)

    def cross_entropy_sum(x, y, lo, hi):
        be = _fastcore if x.shape[0] <= CROSS_ENTROPY_CUTOVER else pure
        return be.cross_entropy_sum(x, y, lo, hi)

    adam_update = _fastcore.adam_update
else:
    raise ValueError(
        f"BASKETDAE_BACKEND={_mode!r} not understood; expected auto, pure or compiled"
    )
