"""Kernel backend selection.

Prefers the Cython-compiled extension (fqsim._kernel_c, built from the same
source as fqsim._kernel) and falls back to the interpreted module when the
extension is unavailable. Set FQSIM_PURE_PYTHON=1 to force the fallback,
e.g. to benchmark one against the other.
"""

import os

from . import _kernel as _pure

if os.environ.get("FQSIM_PURE_PYTHON"):
    _impl = _pure
else:
    try:
        from . import _kernel_c as _impl
        if not getattr(_impl, "__file__", "").endswith((".so", ".pyd")):
            _impl = _pure  # a stray source copy, not a real extension
    except ImportError:
        _impl = _pure

BACKEND = "compiled" if _impl is not _pure else "pure-python"

RngStreams = _impl.RngStreams
EventLoop = _impl.EventLoop
Packet = _impl.Packet
DropTailQueue = _impl.DropTailQueue
FavourQueue = _impl.FavourQueue
NetParams = _impl.NetParams
TcpFlow = _impl.TcpFlow
SimRun = _impl.SimRun
make_queue = _impl.make_queue
build_flows = _impl.build_flows
simulate = _impl.simulate

INF = _impl.INF
V_DROPTAIL = _impl.V_DROPTAIL
V_FAVOUR = _impl.V_FAVOUR
V_FAVOUR_PUSHOUT = _impl.V_FAVOUR_PUSHOUT
VARIANT_NAMES = _impl.VARIANT_NAMES
VARIANT_IDS = _impl.VARIANT_IDS
DIR_FWD = _impl.DIR_FWD
DIR_REV = _impl.DIR_REV
ST_SYN_SENT = _impl.ST_SYN_SENT
ST_SLOW_START = _impl.ST_SLOW_START
ST_CONG_AVOID = _impl.ST_CONG_AVOID
ST_FAST_REC = _impl.ST_FAST_REC
ST_DONE = _impl.ST_DONE


def backend_module(name):
    """Return a specific kernel implementation by name ('pure' or
    'compiled'); raises if the compiled one was requested but not built."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _kernel_c
        if not getattr(_kernel_c, "__file__", "").endswith((".so", ".pyd")):
            raise ImportError("fqsim._kernel_c is not a compiled extension")
        return _kernel_c
    raise ValueError("unknown backend %r" % (name,))
