"""Numeric tolerances and grid defaults shared across modules."""

import os

TOL_FLAT = 1e-9
TOL_SMOOTH = 1e-7
TOL_ORTH = 1e-9
TOL_RANK = 1e-10
TOL_CERT = 1e-9
CLUSTER_TOL = 1e-7
MERGE_RADIUS = 1e-4

DEFAULT_GRID = 4096
DEFAULT_SWEEP = 2048

R_MAX = 1.0
MU_MAX = 1.0

# smallest |t| = |b/a| probed by the certificate sweep
T_FLOOR = 1e-12
T_CAP = 1e8

# Halvings of r and mu below their maxima; BANACH_GRID_DEPTH overrides.
try:
    GRID_DEPTH = int(os.environ.get("BANACH_GRID_DEPTH", "20"))
except ValueError:
    GRID_DEPTH = 20


def grid_depth() -> int:
    """Current sweep depth, re-read from the environment on each call."""
    try:
        return int(os.environ.get("BANACH_GRID_DEPTH", GRID_DEPTH))
    except ValueError:
        return GRID_DEPTH
