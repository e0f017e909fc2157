"""fqsim: a deterministic discrete-event simulator for the FavourQueue
active queue management discipline, with a DropTail baseline, a simplified
TCP flow model, workload generation, measurement, and an analytic model of
the favouring probability."""

__version__ = "0.1.0"

from .kernel import BACKEND  # noqa: F401
