"""SONFIS / SORST-AS: coupled self-organizing two-layer learning dynamics
with a neuron-growth feedback law, plus a parameter-sweep laboratory for
the order/disorder behavior of the neuron-growth observable.
"""

from . import dataset, dynamics, kernels, nfis, rst, som, sweep

__all__ = ["dataset", "dynamics", "kernels", "nfis", "rst", "som", "sweep"]
__version__ = "0.1.0"
