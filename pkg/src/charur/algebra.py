"""Finite matrix representations of su(2), truncated su(1,1) D+(k) and
truncated Fock-space quadratures.

Conventions (hbar = 1):

* su(2): [J1, J2] = i J3 (cyclic), basis |j, m> ordered m = j, j-1, ..., -j.
* su(1,1): [K1, K2] = -i K3, [K2, K3] = i K1, [K3, K1] = i K2, with
  K3|k,n> = (k+n)|k,n> and K+|k,n> = sqrt((n+1)(2k+n))|k,n+1>. These are the
  matrix elements of K+ = eta, K- = 2k d/deta + eta d^2/deta^2,
  K3 = k + eta d/deta acting on the analytic (Barut-Girardello) monomials.
* Fock: q = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), so [q, p] = i.
  Observables are ordered (q_1..q_N, p_1..p_N).
"""

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .matcore import is_hermitian


@dataclass(frozen=True)
class Commutator:
    """Declared bracket ``[X_i, X_j] = i (sum_k f_k X_k + const * I)``."""

    i: int
    j: int
    f: tuple
    const: float = 0.0


@dataclass(frozen=True)
class RepSpec:
    kind: str
    weight: float | None = None
    dim: int | None = None
    modes: int = 1

    def __post_init__(self):
        if self.kind not in ("su2", "su11", "fock"):
            raise ValueError(f"unknown representation kind {self.kind!r}")
        if self.kind == "su2":
            j = _check_spin(self.weight)
            expected = int(round(2 * j)) + 1
            if self.dim is not None and self.dim != expected:
                raise ValueError(f"su2 with j={j} forces dim={expected}")
            object.__setattr__(self, "dim", expected)
        elif self.kind == "su11":
            if self.weight is None or self.weight <= 0:
                raise ValueError("su11 needs a positive weight k")
            if self.dim is not None and self.dim < 4:
                raise ValueError("su11 truncation needs dim >= 4")
        else:
            if self.modes not in (1, 2):
                raise ValueError("fock supports 1 or 2 modes")
            if self.dim is not None and self.dim < 4:
                raise ValueError("fock truncation needs dim >= 4 per mode")

    def to_dict(self):
        d = {"kind": self.kind, "weight": self.weight, "dim": self.dim}
        if self.kind == "fock":
            d["modes"] = self.modes
        return d

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"kind", "weight", "dim", "modes"}
        if unknown:
            raise ValueError(f"unknown RepSpec keys: {sorted(unknown)}")
        return cls(
            kind=data["kind"],
            weight=data.get("weight"),
            dim=data.get("dim"),
            modes=data.get("modes", 1),
        )

    @property
    def truncated(self):
        return self.kind != "su2"


@dataclass(frozen=True, eq=False)
class ObservableSet:
    labels: tuple
    matrices: tuple
    structure: tuple = ()
    interior: np.ndarray | None = None
    rep: RepSpec | None = None

    def __post_init__(self):
        mats = tuple(np.asarray(X, dtype=complex) for X in self.matrices)
        if len(mats) != len(self.labels):
            raise ValueError("labels and matrices differ in length")
        if not mats:
            raise ValueError("empty observable set")
        d = mats[0].shape[0]
        for label, X in zip(self.labels, mats):
            if X.shape != (d, d):
                raise ValueError(f"{label}: shape {X.shape}, expected {(d, d)}")
            if not is_hermitian(X):
                raise ValueError(f"{label} is not Hermitian")
        object.__setattr__(self, "matrices", mats)
        interior = np.arange(d) if self.interior is None else np.asarray(self.interior)
        if interior.size > d:
            raise ValueError("interior larger than the space")
        object.__setattr__(self, "interior", interior)

    @property
    def n(self):
        return len(self.matrices)

    @property
    def dim(self):
        return self.matrices[0].shape[0]

    @property
    def interior_dim(self):
        return int(self.interior.size)

    def __len__(self):
        return self.n

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.matrices[self.labels.index(key)]
        return self.matrices[key]

    def combine(self, coeffs):
        """The operator ``sum_i coeffs[i] X_i`` (complex coefficients allowed)."""
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (self.n,):
            raise ValueError(f"need {self.n} coefficients")
        return np.tensordot(coeffs, np.array(self.matrices), axes=1)

    def transformed(self, L):
        """Observables ``X'_j = sum_k L_jk X_k`` for a real matrix ``L``.

        The structure constants are dropped; they are basis dependent.
        """
        L = np.asarray(L, dtype=float)
        mats = [self.combine(row) for row in L]
        labels = tuple(f"X'{j + 1}" for j in range(len(mats)))
        return ObservableSet(labels, tuple(mats), interior=self.interior, rep=self.rep)

    def subset(self, idx):
        idx = list(idx)
        return ObservableSet(
            tuple(self.labels[i] for i in idx),
            tuple(self.matrices[i] for i in idx),
            interior=self.interior,
            rep=self.rep,
        )

    def with_interior_dim(self, m):
        return replace(self, interior=np.arange(m))


def _check_spin(j):
    if j is None:
        raise ValueError("su2 needs a spin j")
    two_j = Fraction(j).limit_denominator(1000) * 2
    if two_j.denominator != 1 or two_j <= 0 or abs(float(two_j) - 2 * j) > 1e-12:
        raise ValueError(f"invalid spin j={j}; 2j must be a positive integer")
    return float(j)


def su2_raising(j):
    j = _check_spin(j)
    m = j - np.arange(int(round(2 * j)) + 1)
    # J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>; m+1 sits one row up
    return np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)


def su2_generators(j):
    """Spin-j matrices (J1, J2, J3) in the basis m = j, ..., -j."""
    j = _check_spin(j)
    m = j - np.arange(int(round(2 * j)) + 1)
    Jp = su2_raising(j)
    Jm = Jp.conj().T
    J1 = (Jp + Jm) / 2
    J2 = (Jp - Jm) / 2j
    J3 = np.diag(m).astype(complex)
    structure = (
        Commutator(0, 1, (0, 0, 1)),
        Commutator(1, 2, (1, 0, 0)),
        Commutator(2, 0, (0, 1, 0)),
    )
    return ObservableSet(
        ("J1", "J2", "J3"), (J1, J2, J3), structure, rep=RepSpec("su2", j)
    )


def su11_ladder(k, dim):
    """Truncated (K+, K-, K3) on |k, n>, n = 0..dim-1."""
    if k <= 0:
        raise ValueError(f"su11 weight must be positive, got {k}")
    if dim < 4:
        raise ValueError(f"su11 truncation needs dim >= 4, got {dim}")
    n = np.arange(dim - 1)
    Kp = np.diag(np.sqrt((n + 1) * (2 * k + n)), k=-1).astype(complex)
    K3 = np.diag(k + np.arange(dim)).astype(complex)
    return Kp, Kp.conj().T, K3


def su11_generators(k, dim):
    """Hermitian (K1, K2, K3) of D+(k), truncated to ``dim`` levels.

    Only the top level is corrupted by truncation, so the declared brackets
    hold exactly on the first ``dim - 2`` basis states.
    """
    Kp, Km, K3 = su11_ladder(k, dim)
    K1 = (Kp + Km) / 2
    K2 = (Kp - Km) / 2j
    structure = (
        Commutator(0, 1, (0, 0, -1)),
        Commutator(1, 2, (1, 0, 0)),
        Commutator(2, 0, (0, 1, 0)),
    )
    return ObservableSet(
        ("K1", "K2", "K3"),
        (K1, K2, K3),
        structure,
        interior=np.arange(dim - 2),
        rep=RepSpec("su11", k, dim),
    )


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def fock_quadratures(modes, dim_per_mode):
    """Quadratures (q_1..q_N, p_1..p_N) for N = 1 or 2 truncated modes.

    The two-mode basis is the Kronecker product ordering |n1> (x) |n2>.
    """
    if modes not in (1, 2):
        raise ValueError(f"unsupported mode count {modes}")
    if dim_per_mode < 4:
        raise ValueError("fock truncation needs dim >= 4 per mode")
    a = annihilation(dim_per_mode)
    I = np.eye(dim_per_mode)
    if modes == 1:
        ladders = [a]
    else:
        ladders = [np.kron(a, I), np.kron(I, a)]
    qs = [(b + b.conj().T) / np.sqrt(2) for b in ladders]
    ps = [(b - b.conj().T) / (1j * np.sqrt(2)) for b in ladders]
    n = 2 * modes
    structure = []
    for i in range(modes):
        structure.append(Commutator(i, modes + i, (0,) * n, 1.0))
    for i in range(modes):
        for j in range(modes):
            if i != j:
                structure.append(Commutator(i, modes + j, (0,) * n))
        for j in range(i + 1, modes):
            structure.append(Commutator(i, j, (0,) * n))
            structure.append(Commutator(modes + i, modes + j, (0,) * n))
    levels = np.arange(dim_per_mode)
    if modes == 1:
        interior = levels[: dim_per_mode - 2]
    else:
        n1, n2 = np.divmod(np.arange(dim_per_mode**2), dim_per_mode)
        interior = np.flatnonzero((n1 < dim_per_mode - 2) & (n2 < dim_per_mode - 2))
    labels = tuple(f"q{i + 1}" for i in range(modes)) + tuple(
        f"p{i + 1}" for i in range(modes)
    )
    return ObservableSet(
        labels,
        tuple(qs + ps),
        tuple(structure),
        interior=interior,
        rep=RepSpec("fock", None, dim_per_mode, modes),
    )


def build_observables(rep):
    """Observable set for a :class:`RepSpec` (dim must be fixed)."""
    if rep.kind == "su2":
        return su2_generators(rep.weight)
    if rep.dim is None:
        raise ValueError(f"{rep.kind} representation needs an explicit dim")
    if rep.kind == "su11":
        return su11_generators(rep.weight, rep.dim)
    return fock_quadratures(rep.modes, rep.dim)


def structure_residual(obs):
    """Largest operator-norm defect of the declared brackets on the interior."""
    if not obs.structure:
        raise ValueError("observable set declares no commutation structure")
    P = obs.interior
    worst = 0.0
    for c in obs.structure:
        Xi, Xj = obs.matrices[c.i], obs.matrices[c.j]
        expected = 1j * (obs.combine(np.asarray(c.f, dtype=complex)) + c.const * np.eye(obs.dim))
        defect = (Xi @ Xj - Xj @ Xi - expected)[:, P]
        if defect.size:
            worst = max(worst, float(np.linalg.norm(defect, 2)))
    return worst
