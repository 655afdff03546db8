"""State families as coefficient vectors in the representation bases.

Truncated families carry a ``tail_mass`` diagnostic: the norm fraction in the
top two basis levels (per mode for Fock states). Constructors refuse to
return states whose tail mass reaches ``TAIL_LIMIT``.

Analytic pairing used for su(1,1): a state ``sum c_n |k,n>`` corresponds to
``f(eta) = sum c_n eta**n / sqrt(n! Gamma(2k+n))``. Under this pairing
``K+ = eta`` maps ``|k,n>`` to ``sqrt((n+1)(2k+n)) |k,n+1>``, matching
:func:`charur.algebra.su11_ladder`.
"""

from dataclasses import dataclass
import cmath
import math

import mpmath
import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .algebra import RepSpec, annihilation, su11_ladder, su2_generators, su2_raising

TAIL_LIMIT = 1e-12


class TruncationError(ValueError):
    """The state does not fit in the requested truncation."""


class NonNormalizableError(ValueError):
    """The requested parameters do not describe a normalizable state."""


class UnsupportedBranchError(ValueError):
    """The u = 0 branch of the general algebraic coherent states."""


@dataclass(frozen=True, eq=False)
class QuantumState:
    kind: str
    data: np.ndarray
    basis: RepSpec | None = None
    tail_mass: float = 0.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if self.kind == "pure":
            if data.ndim != 1:
                raise ValueError("pure state needs a coefficient vector")
            norm = np.linalg.norm(data)
            if abs(norm - 1) > 1e-12:
                raise ValueError(f"pure state not normalized (norm {norm!r})")
        elif self.kind == "mixed":
            if data.ndim != 2 or data.shape[0] != data.shape[1]:
                raise ValueError("mixed state needs a square density matrix")
            if np.abs(data - data.conj().T).max() > 1e-12:
                raise ValueError("density matrix not Hermitian")
            if abs(np.trace(data) - 1) > 1e-12:
                raise ValueError("density matrix trace differs from 1")
            if np.linalg.eigvalsh(data)[0] < -1e-10:
                raise ValueError("density matrix not positive semidefinite")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        object.__setattr__(self, "data", data)

    @property
    def dim(self):
        return self.data.shape[0]

    @property
    def is_pure(self):
        return self.kind == "pure"

    @property
    def vector(self):
        if not self.is_pure:
            raise ValueError("mixed state has no state vector")
        return self.data

    def density(self):
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data


def _fix_phase(c):
    nz = np.flatnonzero(np.abs(c) > 0)
    if nz.size:
        c = c * np.exp(-1j * np.angle(c[nz[0]]))
    return c


def tail_mass(c, modes=1):
    """Probability in the top two levels (of each mode) of a pure vector."""
    p = np.abs(np.asarray(c)) ** 2
    p = p / p.sum()
    if modes == 1:
        return float(p[-2:].sum())
    d = int(round(math.sqrt(p.size)))
    p = p.reshape(d, d)
    return float(max(p[-2:, :].sum(), p[:, -2:].sum()))


def pure_state(c, basis=None, modes=1, check_tail=True):
    """Normalize ``c``, fix its phase and wrap it, enforcing the tail limit."""
    c = np.asarray(c, dtype=complex)
    norm = np.linalg.norm(c)
    if not np.isfinite(norm) or norm == 0:
        raise NonNormalizableError("coefficient vector is zero or non-finite")
    c = _fix_phase(c / norm)
    c = c / np.linalg.norm(c)
    tail = tail_mass(c, modes) if basis is not None and basis.truncated else 0.0
    if check_tail and tail >= TAIL_LIMIT:
        raise TruncationError(
            f"tail mass {tail:.2e} at dim {c.size}; increase the truncation"
        )
    return QuantumState("pure", c, basis, tail)


def mixed_state(rho, basis=None):
    rho = np.asarray(rho, dtype=complex)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    tail = 0.0
    if basis is not None and basis.truncated:
        p = np.diag(rho).real
        if basis.modes == 1:
            tail = float(p[-2:].sum())
        else:
            d = basis.dim
            p = p.reshape(d, d)
            tail = float(max(p[-2:, :].sum(), p[:, -2:].sum()))
    return QuantumState("mixed", rho, basis, tail)


def basis_state(n, dim, basis=None):
    c = np.zeros(dim, dtype=complex)
    c[n] = 1
    return pure_state(c, basis, modes=basis.modes if basis else 1)


def su11_lowest(k, dim):
    """The lowest-weight vector |k, 0>."""
    return basis_state(0, dim, RepSpec("su11", k, dim))


def su11_cs(zeta, k, dim):
    """N exp(zeta K+) |k,0>, coefficients zeta**n sqrt((2k)_n / n!)."""
    zeta = complex(zeta)
    if abs(zeta) >= 1:
        raise NonNormalizableError(f"|zeta| = {abs(zeta)} must be < 1")
    rep = RepSpec("su11", k, dim)
    n = np.arange(dim)
    if zeta == 0:
        return basis_state(0, dim, rep)
    logmag = n * math.log(abs(zeta)) + 0.5 * (
        gammaln(2 * k + n) - gammaln(2 * k) - gammaln(n + 1)
    )
    c = np.exp(logmag - logmag.max() + 1j * n * cmath.phase(zeta))
    return pure_state(c, rep)


def bloch_cs(tau, j):
    """N exp(tau J+) |j,-j> in the m = j..-j basis (|j,-j> is the last entry)."""
    Jp = su2_raising(j)
    d = Jp.shape[0]
    c = np.zeros(d, dtype=complex)
    c[-1] = 1
    # exp(tau J+) is a finite sum since J+ is nilpotent
    term = c.copy()
    out = c.copy()
    for m in range(1, d):
        term = tau * (Jp @ term) / m
        out = out + term
    return pure_state(out, su2_generators(j).rep)


def spin_state(m, j):
    """Basis vector |j, m>."""
    d = int(round(2 * j)) + 1
    idx = int(round(j - m))
    return basis_state(idx, d, su2_generators(j).rep)


def bg_cs(z, k, dim):
    """Barut-Girardello state: eigenvector of K- with eigenvalue ``z``."""
    z = complex(z)
    c = np.zeros(dim, dtype=complex)
    c[0] = 1
    for n in range(dim - 1):
        c[n + 1] = z * c[n] / math.sqrt((n + 1) * (2 * k + n))
    return pure_state(c, RepSpec("su11", k, dim))


@dataclass(frozen=True)
class AlgebraicCSParams:
    """Parameters of the eigenvalue problem (u K- + v K+ + w K3) psi = z psi.

    Derived quantities of the Kummer-series solution are properties, so they
    are never stale. The branch of ``l = sqrt(w**2 - 4uv)`` is chosen so that
    the exponential prefactor ``exp(c eta)`` has the smaller rate ``|c|``;
    both branches give the same function by Kummer's transformation.
    """

    z: complex
    u: complex
    v: complex
    w: complex
    k: float

    @property
    def l(self):
        root = cmath.sqrt(complex(self.w) ** 2 - 4 * complex(self.u) * complex(self.v))
        if self.u == 0:
            return root
        c_plus = -(self.w + root) / (2 * self.u)
        c_minus = -(self.w - root) / (2 * self.u)
        return root if abs(c_plus) <= abs(c_minus) else -root

    @property
    def a(self):
        return self.k + self.z / self.l

    @property
    def b(self):
        return 2 * self.k

    @property
    def c(self):
        return -(self.w + self.l) / (2 * self.u)

    @property
    def c1(self):
        return self.l / self.u


def _kummer_product_coeffs(params, dim, dps):
    """Basis coefficients of e^{c eta} 1F1(a; b; c1 eta) at ``dps`` digits.

    ``1F1`` Taylor terms use the ratio ``((k+j) l + z) / (u (2k+j)(j+1))``,
    i.e. ``(a+j) c1 / ((b+j)(j+1))``, which stays finite as ``l -> 0``.
    Returns (coefficients, largest absolute convolution term).
    """
    with mpmath.workdps(dps):
        k = mpmath.mpf(params.k)
        u, z = mpmath.mpc(params.u), mpmath.mpc(params.z)
        l = mpmath.mpc(params.l)
        c = -(mpmath.mpc(params.w) + l) / (2 * u)
        # e_n = c^n / n!, h_n = 1F1 terms; both scaled by n! below
        e = [mpmath.mpc(1)]
        h = [mpmath.mpc(1)]
        for j in range(dim - 1):
            e.append(e[-1] * c / (j + 1))
            num = (k + j) * l + z
            # a = -j up to rounding: the series terminates (polynomial solution)
            if abs(num) <= 1e-12 * (abs((k + j) * l) + abs(z)):
                num = mpmath.mpc(0)
            h.append(h[-1] * num / (u * (2 * k + j) * (j + 1)))
        out = []
        biggest = mpmath.mpf(0)
        for n in range(dim):
            # weight sqrt(n! Gamma(2k+n)), divided by sqrt(Gamma(2k)) overall
            wn = mpmath.sqrt(mpmath.factorial(n) * mpmath.rf(2 * k, n))
            s = mpmath.mpc(0)
            big = mpmath.mpf(0)
            for m in range(n + 1):
                t = e[m] * h[n - m]
                s += t
                big += abs(t)
            out.append(s * wn)
            biggest = max(biggest, big * wn)
        return np.array([complex(x) for x in out]), float(biggest)


def algebraic_cs_series(params, dim, check_residual=True):
    """Eigenstate of u K- + v K+ + w K3 from the Kummer-function solution.

    The analytic function ``N e^{c eta} 1F1(a; 2k; c1 eta)`` is expanded in a
    Taylor series (coefficient convolution), mapped to basis coefficients
    with the ``sqrt(n! Gamma(2k+n))`` weight and normalized.
    """
    if params.u == 0:
        raise UnsupportedBranchError("u = 0 is not covered by the series solution")
    if abs(params.c) >= 1:
        raise NonNormalizableError(
            f"prefactor rate |c| = {abs(params.c):.3g} >= 1; state not normalizable"
        )
    coeffs, biggest = _kummer_product_coeffs(params, dim, 30)
    # rerun with enough digits to absorb cancellation in the convolution
    lost = math.log10(max(biggest / max(abs(coeffs[0]), 1e-300), 1.0))
    if lost > 12:
        coeffs, _ = _kummer_product_coeffs(params, dim, int(30 + lost))
    if not np.all(np.isfinite(coeffs)):
        raise NonNormalizableError("series coefficients overflowed")
    state = pure_state(coeffs, RepSpec("su11", params.k, dim))
    if check_residual:
        res = algebraic_residual(state, params)
        if res > 1e-8:
            raise TruncationError(f"eigen-equation residual {res:.2e} at dim {dim}")
    return state


def algebraic_residual(state, params):
    """||(u K- + v K+ + w K3 - z) psi|| over the interior rows.

    The top two rows are dropped: there the truncated K+ misses the
    coupling to levels beyond the cutoff.
    """
    Kp, Km, K3 = su11_ladder(params.k, state.dim)
    B = params.u * Km + params.v * Kp + params.w * K3
    r = B @ state.vector - params.z * state.vector
    return float(np.linalg.norm(r[:-2]))


def algebraic_cs_eigensolve(u, v, w, k, dim, target=None):
    """Eigenpair of the truncated u K- + v K+ + w K3 (independent of the series).

    With ``target`` given, the state is the smallest right singular vector of
    ``B - target`` (robust for the non-normal case, where the untruncated
    operator has a continuum of eigenvalues). Without it, the eigenvector of
    smallest ``|z|`` among those that fit the truncation is returned.
    Returns ``(state, z)`` with ``z`` the Rayleigh quotient.
    """
    if dim < 8:
        raise ValueError("eigensolve needs dim >= 8")
    rep = RepSpec("su11", k, dim)
    Kp, Km, K3 = su11_ladder(k, dim)
    B = u * Km + v * Kp + w * K3
    if target is not None:
        _, _, Vh = np.linalg.svd(B - target * np.eye(dim))
        candidates = [Vh[-1].conj()]
    else:
        if abs(v - np.conj(u)) < 1e-14 and abs(np.imag(w)) < 1e-14:
            vals, vecs = np.linalg.eigh((B + B.conj().T) / 2)
        else:
            vals, vecs = np.linalg.eig(B)
        order = np.argsort(np.abs(vals))
        candidates = [vecs[:, i] for i in order]
    for vec in candidates:
        if tail_mass(vec) < TAIL_LIMIT:
            state = pure_state(vec, rep)
            psi = state.vector
            z = complex(psi.conj() @ B @ psi)
            return state, z
    raise TruncationError(
        "no eigenvector fits the truncation; raise dim or check normalizability"
    )


def squeezed_vacuum(r, dim):
    """S(r)|0> with S(r) = exp(r (a^2 - a^dag^2) / 2), squeezing q for r > 0.

    Built as su11_cs(-tanh r, 1/4) placed on the even Fock levels.
    """
    zeta = -math.tanh(r)
    half = (dim + 1) // 2
    inner = su11_cs(zeta, 0.25, half) if r != 0 else None
    c = np.zeros(dim, dtype=complex)
    if inner is None:
        c[0] = 1
    else:
        c[0::2] = inner.vector[: len(c[0::2])]
    return pure_state(c, RepSpec("fock", None, dim))


def coherent_amplitudes(alpha, dim):
    n = np.arange(dim)
    alpha = complex(alpha)
    if alpha == 0:
        c = np.zeros(dim, dtype=complex)
        c[0] = 1
        return c
    logmag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1) - abs(alpha) ** 2 / 2
    return np.exp(logmag + 1j * n * cmath.phase(alpha))


def coherent_state(alpha, dim):
    return pure_state(coherent_amplitudes(alpha, dim), RepSpec("fock", None, dim))


def even_odd_cs(alpha, parity, dim):
    """N(|alpha> +/- |-alpha>); the odd state at alpha = 0 is its limit |1>."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    rep = RepSpec("fock", None, dim)
    if alpha == 0:
        return basis_state(0 if parity == "even" else 1, dim, rep)
    c = coherent_amplitudes(alpha, dim)
    n = np.arange(dim)
    keep = (n % 2 == 0) if parity == "even" else (n % 2 == 1)
    return pure_state(np.where(keep, c, 0), rep)


def fock_state(n, dim, modes=1):
    rep = RepSpec("fock", None, dim, modes)
    if modes == 1:
        return basis_state(n, dim, rep)
    n1, n2 = n
    return basis_state(n1 * dim + n2, dim * dim, rep)


def vacuum(dim, modes=1):
    return fock_state(0 if modes == 1 else (0, 0), dim, modes)


def thermal_state(nbar, dim):
    """Diagonal Fock mixture with geometric occupation of mean ``nbar``."""
    n = np.arange(dim)
    p = (nbar / (1 + nbar)) ** n if nbar > 0 else (n == 0).astype(float)
    return mixed_state(np.diag(p), RepSpec("fock", None, dim))


def squeezed_thermal_state(r, phi, nbar, dim):
    """S(xi) rho_thermal S(xi)^dag with xi = r e^{i phi}, built on a doubled
    space and cropped back to ``dim`` levels."""
    big = 2 * dim
    a = annihilation(big)
    xi = r * np.exp(1j * phi)
    S = expm((np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T) / 2)
    n = np.arange(big)
    p = (nbar / (1 + nbar)) ** n if nbar > 0 else (n == 0).astype(float)
    rho = S @ np.diag(p / p.sum()) @ S.conj().T
    lost = 1 - np.trace(rho[:dim, :dim]).real
    if lost > TAIL_LIMIT:
        raise TruncationError(f"{lost:.2e} of the state lies above dim {dim}")
    return mixed_state(rho[:dim, :dim], RepSpec("fock", None, dim))


def haar_state(dim, rng):
    c = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return QuantumState("pure", c / np.linalg.norm(c))


def random_mixed_state(dim, rng, rank=None):
    """Convex mixture of ``rank`` Haar-random pure states with random weights."""
    rank = rank or int(rng.integers(2, dim + 1))
    weights = rng.dirichlet(np.ones(rank))
    rho = sum(w * haar_state(dim, rng).density() for w in weights)
    return mixed_state(rho)


def _cplx(params, name, default=0.0):
    return complex(params.get(name, default))


def make_state(family, params, rep):
    """Build a named state family on the representation ``rep``.

    ``params`` maps parameter names to numbers (complex allowed); ``rep``
    supplies k, j or the Fock truncation.
    """
    params = dict(params or {})
    dim = rep.dim
    if family in ("su11_cs", "su11_lowest", "bg_cs", "algebraic_cs") and rep.kind != "su11":
        raise ValueError(f"{family} lives on an su11 representation")
    if family in ("bloch", "spin") and rep.kind != "su2":
        raise ValueError(f"{family} lives on an su2 representation")
    if family in ("vacuum", "fock", "squeezed_vacuum", "even_cs", "odd_cs",
                  "coherent", "thermal") and rep.kind != "fock":
        raise ValueError(f"{family} lives on a fock representation")
    if family == "su11_cs":
        return su11_cs(_cplx(params, "zeta"), rep.weight, dim)
    if family == "su11_lowest":
        return su11_lowest(rep.weight, dim)
    if family == "bg_cs":
        return bg_cs(_cplx(params, "z"), rep.weight, dim)
    if family == "algebraic_cs":
        p = AlgebraicCSParams(
            _cplx(params, "z"), _cplx(params, "u", 1), _cplx(params, "v"),
            _cplx(params, "w"), rep.weight,
        )
        return algebraic_cs_series(p, dim)
    if family == "bloch":
        return bloch_cs(_cplx(params, "tau"), rep.weight)
    if family == "spin":
        return spin_state(float(params.get("m", rep.weight)), rep.weight)
    if family == "vacuum":
        return vacuum(dim, rep.modes)
    if family == "fock":
        n = params.get("n", 0)
        return fock_state(int(n) if rep.modes == 1 else tuple(n), dim, rep.modes)
    if rep.modes != 1:
        raise ValueError(f"{family} is a single-mode family")
    if family == "squeezed_vacuum":
        return squeezed_vacuum(float(params.get("r", 0.0)), dim)
    if family in ("even_cs", "odd_cs"):
        return even_odd_cs(_cplx(params, "alpha"), family[:-3], dim)
    if family == "coherent":
        return coherent_state(_cplx(params, "alpha"), dim)
    if family == "thermal":
        return thermal_state(float(params.get("nbar", 0.0)), dim)
    raise ValueError(f"unknown state family {family!r}")


FAMILIES = (
    "su11_cs", "su11_lowest", "bg_cs", "algebraic_cs", "bloch", "spin", "vacuum",
    "fock", "squeezed_vacuum", "even_cs", "odd_cs", "coherent", "thermal",
)
