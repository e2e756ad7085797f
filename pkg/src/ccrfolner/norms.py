"""Matrix norms shared by the compression and c.p.-map modules."""
import numpy as np


def two_norm(F) -> float:
    """Normalised Hilbert-Schmidt norm sqrt(tr(F* F)) with tr(1) = 1."""
    F = np.asarray(F)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise ValueError(f"two_norm needs a square matrix, got shape {F.shape}")
    k = F.shape[0]
    if k == 0:
        return 0.0
    return float(np.sqrt(np.vdot(F, F).real / k))


def trace_norm(F) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(np.asarray(F), compute_uv=False).sum())


def op_norm(F) -> float:
    F = np.asarray(F)
    if F.size == 0:
        return 0.0
    return float(np.linalg.norm(F, 2))
