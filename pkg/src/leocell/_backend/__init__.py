"""Kernel backend selection.

Imports the compiled extension when available, otherwise falls back to the
pure Python kernels. Both produce bit-identical numbers; the compiled one
is orders of magnitude faster for training. Set LEOCELL_BACKEND=pure or
LEOCELL_BACKEND=compiled to force a choice.
"""
import os

from . import _pure

_requested = os.environ.get("LEOCELL_BACKEND", "").strip().lower()

if _requested == "pure":
    _impl = _pure
elif _requested in ("", "compiled"):
    try:
        from . import _fast as _impl
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "LEOCELL_BACKEND=compiled but the extension is not built; "
                "reinstall the package or unset the variable")
        _impl = _pure
else:
    raise ImportError(
        f"unknown LEOCELL_BACKEND value {_requested!r}, expected 'pure' or 'compiled'")

BACKEND_NAME = _impl.NAME

forward_single = _impl.forward_single
predict_batch = _impl.predict_batch
train_epochs = _impl.train_epochs
grad_single = _impl.grad_single
loss_single = _impl.loss_single
