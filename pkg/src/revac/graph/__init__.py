"""Social Alignment Graph and its analyses."""

from .acts import (
    ACT_EDGE,
    EDGE_WEIGHTS,
    ActKind,
    EdgeKind,
    SagEdge,
    SocialAct,
    accuse,
    claim,
    defend,
    vote,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .sag import DEFAULT_COLLUSION_THRESHOLD, Pressure, SocialAlignmentGraph
