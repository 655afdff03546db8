"""Auto-truncation: double the basis size until reported scalars settle."""

import numpy as np

from .states import TruncationError

START_DIM = 32
MAX_DIM = 4096
CONVERGENCE_TOL = 1e-10


class NonConvergenceError(RuntimeError):
    """Raised when no truncation up to the cap gives converged results."""


def converge(evaluate, start=START_DIM, cap=MAX_DIM, tol=CONVERGENCE_TOL):
    """Run ``evaluate(dim)`` at dim = start, 2 start, ... until stable.

    ``evaluate`` returns ``(result, scalars)``; it may raise
    :class:`TruncationError` when the state does not fit yet. Convergence means
    two consecutive successful runs whose scalars differ by at most
    ``tol * max(1, |x|)`` elementwise. Returns ``(result, dim)``.
    """
    prev = None
    dim = start
    last_error = None
    while dim <= cap:
        try:
            result, scalars = evaluate(dim)
        except TruncationError as exc:
            last_error = exc
            prev = None
            dim *= 2
            continue
        scalars = np.asarray(scalars, dtype=float)
        if prev is not None and prev.shape == scalars.shape:
            if np.all(np.abs(scalars - prev) <= tol * np.maximum(1.0, np.abs(scalars))):
                return result, dim
        prev = scalars
        dim *= 2
    msg = f"results did not converge up to dim {cap}"
    if last_error is not None:
        msg += f" (last truncation error: {last_error})"
    raise NonConvergenceError(msg)
