"""Dense matrix kernel: principal minors, characteristic coefficients,
positivity tests, congruences and Williamson normal form.

Characteristic coefficients follow the convention

    det(M - x I) = sum_r C_r(M) (-x)^(n - r),

so ``C_0 = 1``, ``C_1 = Tr M`` and ``C_n = det M``.
"""

from itertools import combinations

import numpy as np
from scipy.linalg import schur

MAX_MINOR_DIM = 12
HERMITIAN_RTOL = 1e-12
ZERO_DET_RTOL = 1e-12


class SingularTransformError(ValueError):
    """Raised when a congruence matrix is (numerically) singular."""


class NotPositiveDefiniteError(ValueError):
    """Raised when a positive definite matrix is required and not given."""


def _square(M, name="M"):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def _real(M, name="M"):
    if np.iscomplexobj(M):
        if np.abs(M.imag).max(initial=0.0) > 0:
            raise ValueError(f"{name} must be real")
        M = M.real
    return M.astype(float)


def _max_norm(M):
    return float(np.abs(M).max(initial=0.0))


def _snap(dets, scale, r):
    """Zero out determinants below the scale-aware threshold."""
    thresh = ZERO_DET_RTOL * max(scale, 1e-300) ** r
    return np.where(np.abs(dets) <= thresh, 0.0, dets)


def principal_minor(M, idx):
    """Determinant of the principal submatrix ``M[idx, idx]``.

    ``idx`` holds zero-based indices; order is irrelevant but duplicates are
    rejected. Values below ``1e-12 * max|M|**r`` are returned as exactly 0.
    """
    M = _square(M)
    idx = np.asarray(idx, dtype=int).ravel()
    if idx.size == 0:
        raise ValueError("index subset must be nonempty")
    if np.unique(idx).size != idx.size:
        raise ValueError(f"duplicate indices in {idx.tolist()}")
    n = M.shape[0]
    if idx.min() < 0 or idx.max() >= n:
        raise IndexError(f"indices {idx.tolist()} out of range for n={n}")
    idx = np.sort(idx)
    sub = M[np.ix_(idx, idx)]
    det = np.linalg.det(sub)
    if np.iscomplexobj(det):
        if abs(det.imag) > ZERO_DET_RTOL * max(1.0, abs(det.real)):
            return complex(det)
        det = det.real
    return float(_snap(np.array([det]), _max_norm(M), idx.size)[0])


def minors_of_order(M, r):
    """All order-``r`` principal minors, keyed by sorted index tuples.

    Subsets are enumerated lexicographically.
    """
    M = _real(_square(M))
    n = M.shape[0]
    subsets = list(combinations(range(n), r))
    if not subsets:
        return {}
    idx = np.array(subsets)
    subs = M[idx[:, :, None], idx[:, None, :]]
    dets = _snap(np.linalg.det(subs), _max_norm(M), r)
    return dict(zip(subsets, dets.tolist()))


def char_coeffs_minors(M):
    """Characteristic coefficients as sums of principal minors.

    Cost grows like ``2**n``; inputs with ``n > 12`` are rejected (use
    :func:`char_coeffs_faddeev` there).
    """
    M = _real(_square(M))
    n = M.shape[0]
    if n > MAX_MINOR_DIM:
        raise ValueError(
            f"minor expansion capped at n={MAX_MINOR_DIM}, got n={n}; "
            "use char_coeffs_faddeev"
        )
    scale = _max_norm(M)
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    for r in range(1, n + 1):
        idx = np.array(list(combinations(range(n), r)))
        subs = M[idx[:, :, None], idx[:, None, :]]
        coeffs[r] = _snap(np.linalg.det(subs), scale, r).sum()
    return coeffs


def char_coeffs_faddeev(M):
    """Characteristic coefficients by the Faddeev-LeVerrier trace recursion.

    With ``p(x) = det(x I - M) = sum_k c_k x**k`` the recursion is
    ``B_1 = I``, ``c_{n-k} = -Tr(M B_k) / k``, ``B_{k+1} = M B_k + c_{n-k} I``,
    and ``C_r = (-1)**r c_{n-r}``.
    """
    M = _square(M)
    n = M.shape[0]
    dtype = complex if np.iscomplexobj(M) else float
    M = M.astype(dtype)
    coeffs = np.zeros(n + 1, dtype=dtype)
    coeffs[0] = 1.0
    B = np.eye(n, dtype=dtype)
    for k in range(1, n + 1):
        MB = M @ B
        c = -np.trace(MB) / k
        coeffs[k] = (-1) ** k * c
        B = MB + c * np.eye(n, dtype=dtype)
    return coeffs


def is_hermitian(H, rtol=HERMITIAN_RTOL):
    H = _square(H)
    return np.abs(H - H.conj().T).max(initial=0.0) <= rtol * max(1.0, _max_norm(H))


def is_psd(H, tol=1e-10):
    """True iff the Hermitian matrix ``H`` has smallest eigenvalue >= -tol."""
    H = _square(H, "H")
    if not is_hermitian(H):
        raise ValueError("is_psd requires a Hermitian matrix")
    H = (H + H.conj().T) / 2
    return bool(np.linalg.eigvalsh(H)[0] >= -tol)


def congruence(L, M):
    """Return ``L @ M @ L.T`` for a real nonsingular ``L``."""
    L = _real(_square(L, "L"), "L")
    M = _square(M)
    if L.shape != M.shape:
        raise ValueError(f"shape mismatch {L.shape} vs {M.shape}")
    n = L.shape[0]
    if abs(np.linalg.det(L)) <= ZERO_DET_RTOL * max(_max_norm(L), 1e-300) ** n:
        raise SingularTransformError("congruence matrix is singular")
    return L @ M @ L.T


def symplectic_form(N):
    """The ``2N x 2N`` form ``[[0, -I], [I, 0]]`` in (q_1..q_N, p_1..p_N) order."""
    I = np.eye(N)
    Z = np.zeros((N, N))
    return np.block([[Z, -I], [I, Z]])


def williamson(sigma):
    """Williamson normal form of a real symmetric positive definite matrix.

    Returns ``(L, nus)`` with ``L J L.T = J`` and
    ``L sigma L.T = diag(nus, nus)``, ``nus`` sorted descending.

    The antisymmetric matrix ``A = s J s`` with ``s = sigma**(1/2)`` is brought
    to real normal form ``O.T A O = [[0, -D], [D, 0]]``; then
    ``L = diag(nus, nus)**(1/2) O.T s**-1`` does the job.
    """
    sigma = _real(_square(sigma, "sigma"), "sigma")
    dim = sigma.shape[0]
    if dim % 2:
        raise ValueError("williamson needs an even dimension")
    if np.abs(sigma - sigma.T).max() > HERMITIAN_RTOL * max(1.0, _max_norm(sigma)):
        raise ValueError("sigma must be symmetric")
    sigma = (sigma + sigma.T) / 2
    evals, evecs = np.linalg.eigh(sigma)
    if evals[0] <= 0:
        raise NotPositiveDefiniteError(
            f"sigma must be positive definite (min eigenvalue {evals[0]:.3e})"
        )
    N = dim // 2
    root = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    inv_root = evecs @ np.diag(1 / np.sqrt(evals)) @ evecs.T
    J = symplectic_form(N)
    A = root @ J @ root
    A = (A - A.T) / 2
    T, Z = schur(A, output="real")

    # Schur blocks sit on (2i, 2i+1) as [[0, t], [-t, 0]]; pair them up.
    qcols, pcols, nus = [], [], []
    i = 0
    while i < dim:
        t = T[i, i + 1]
        a, b = Z[:, i], Z[:, i + 1]
        # want O.T A O to have (q, p) entry -nu and (p, q) entry +nu
        if t < 0:
            qcols.append(a)
            pcols.append(b)
        else:
            qcols.append(b)
            pcols.append(a)
        nus.append(abs(t))
        i += 2
    order = np.argsort(nus)[::-1]
    nus = np.array(nus)[order]
    O = np.column_stack([qcols[j] for j in order] + [pcols[j] for j in order])
    D = np.concatenate([nus, nus])
    L = np.diag(np.sqrt(D)) @ O.T @ inv_root
    return L, nus
