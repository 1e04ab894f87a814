"""Concrete basis structures on finite-dimensional Hilbert spaces.

Tensors follow one convention throughout: a map ``A -> B`` is stored with
output axes first, so ``delta`` has shape ``(d, d, d)`` indexed
``[out1, out2, in]``, ``gamma`` has shape ``(d,)`` and a dualiser
``A -> A*`` is a ``(d, d)`` matrix indexed ``[out, in]``.

The ambient compact structure pairs ``A`` with ``A*`` by the Kronecker delta
(``A*`` is stored in conjugated coordinates), so ``epsilon[i, j]`` is the
effect ``A (x) A* -> I``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotUnitary, ShapeMismatch

TOL = 1e-9
STAR_TOL = 1e-6  # looser gate for deciding whether U_* differs from U


def _arr(x, shape: tuple | None = None, name: str = "tensor") -> np.ndarray:
    a = np.asarray(x, dtype=np.complex128)
    if shape is not None and a.shape != shape:
        raise ShapeMismatch(f"{name} has shape {a.shape}, expected {shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def max_dev(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    return float(np.max(np.abs(a - b), initial=0.0))


@dataclass(frozen=True, eq=False)
class FrobeniusStructure:
    dim: int
    delta: np.ndarray
    gamma: np.ndarray
    name: str = ""

    def __post_init__(self):
        d = self.dim
        object.__setattr__(self, "delta", _arr(self.delta, (d, d, d), "delta"))
        object.__setattr__(self, "gamma", _arr(self.gamma, (d,), "gamma"))


@dataclass(frozen=True, eq=False)
class BasisStructure(FrobeniusStructure):
    dualiser: np.ndarray = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        d = self.dim
        if self.dualiser is None:
            object.__setattr__(self, "dualiser", dualiser_from_epsilon(self, ambient_epsilon(d)))
        else:
            object.__setattr__(self, "dualiser", _arr(self.dualiser, (d, d), "dualiser"))

    def __repr__(self) -> str:
        return f"BasisStructure({self.name or '?'}, dim={self.dim})"


@dataclass
class LawReport:
    residuals: dict[str, float]
    tol: float = TOL

    @property
    def ok(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    def failing(self) -> list[str]:
        return [k for k, r in self.residuals.items() if r > self.tol]


def ambient_epsilon(dim: int) -> np.ndarray:
    """Kronecker pairing ``e_i (x) conj(e_j) -> <e_i, e_j>``."""
    return np.eye(dim, dtype=np.complex128)


def is_unitary(U, tol: float = TOL) -> bool:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    eye = np.eye(U.shape[0])
    return max_dev(U.conj().T @ U, eye) <= tol and max_dev(U @ U.conj().T, eye) <= tol


# ---------------------------------------------------------------- builders


def from_basis(B, dualiser=None, name: str = "") -> BasisStructure:
    """Copy/delete structure of the orthonormal basis given as columns of ``B``."""
    B = _arr(B, name="basis")
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ShapeMismatch(f"basis matrix must be square, got {B.shape}")
    if not is_unitary(B):
        raise NotUnitary("basis vectors are not orthonormal")
    delta = np.einsum("ak,bk,ik->abi", B, B, B.conj())
    gamma = B.conj().sum(axis=1)
    return BasisStructure(B.shape[0], delta, gamma, name, dualiser)


_S2 = 1 / np.sqrt(2)
_BASES = {
    "Z": np.eye(2),
    "X": np.array([[1, 1], [1, -1]]) * _S2,
    "Y": np.array([[1, 1], [1j, -1j]]) * _S2,
}


def builtin(name: str) -> BasisStructure:
    """The qubit Z, X or Y structure, each paired with the fixed ambient pairing."""
    try:
        B = _BASES[name.upper()]
    except KeyError:
        raise KeyError(f"unknown built-in structure {name!r}; choose Z, X or Y") from None
    return from_basis(B, name=name.upper())


def trivial() -> BasisStructure:
    """The one-dimensional structure, unit for :func:`tensor_structures`."""
    return from_basis(np.eye(1), name="I")


def basis_vectors(s: FrobeniusStructure, seed: int = 0) -> np.ndarray:
    """Recover the copyable vectors of ``s`` as columns, phased so that gamma(b) = 1.

    They are the eigenvectors of ``(w^dagger (x) 1) o delta`` for a generic ``w``.
    """
    rng = np.random.default_rng(seed)
    w = rng.normal(size=s.dim) + 1j * rng.normal(size=s.dim)
    M = np.einsum("a,abi->bi", w.conj(), s.delta)
    _, vecs = np.linalg.eig(M)
    cols = []
    for k in range(s.dim):
        v = vecs[:, k] / np.linalg.norm(vecs[:, k])
        g = s.gamma @ v
        if abs(g) > 1e-12:
            v = v * (abs(g) / g)
        cols.append(v)
    return np.array(cols).T


# ------------------------------------------------------------------- laws


def check_frobenius(s: FrobeniusStructure) -> LawReport:
    """Residuals of the comonoid, specialness and Frobenius laws."""
    d, delta, gamma = s.dim, s.delta, s.gamma
    if delta.shape != (d, d, d) or gamma.shape != (d,):
        raise ShapeMismatch("structure tensors do not match dim")
    eye = np.eye(d)
    # (delta (x) 1) delta  vs  (1 (x) delta) delta, indexed [a, b, c, i]
    left = np.einsum("abk,kci->abci", delta, delta)
    right = np.einsum("bck,aki->abci", delta, delta)
    counit_l = np.einsum("a,aci->ci", gamma, delta)
    counit_r = np.einsum("c,aci->ai", gamma, delta)
    special = np.einsum("abj,abi->ji", delta.conj(), delta)
    frob_lhs = np.einsum("abk,cek->abce", delta, delta.conj())
    frob_rhs = np.einsum("cka,kbe->abce", delta.conj(), delta)
    return LawReport({
        "coassociativity": max_dev(left, right),
        "counit": max(max_dev(counit_l, eye), max_dev(counit_r, eye)),
        "cocommutativity": max_dev(delta, delta.transpose(1, 0, 2)),
        "specialness": max_dev(special, eye),
        "frobenius": max_dev(frob_lhs, frob_rhs),
    })


def snake_residual(epsilon) -> float:
    """Deviation of ``(eps (x) 1)(1 (x) swap)(1 (x) eps^dagger)`` from the identity."""
    eps = np.asarray(epsilon)
    loop = np.einsum("ij,aj->ai", eps, eps.conj())
    return max_dev(loop, np.eye(eps.shape[0]))


def check_basis(s: BasisStructure) -> LawReport:
    """Frobenius laws plus dualiser unitarity and the snake for the induced pairing."""
    rep = check_frobenius(s)
    d = s.dualiser
    eye = np.eye(s.dim)
    rep.residuals["dualiser-unitarity"] = max(
        max_dev(d.conj().T @ d, eye), max_dev(d @ d.conj().T, eye))
    rep.residuals["snake"] = snake_residual(epsilon_from_dualiser(s))
    return rep


def induced_epsilon_selfdual(s: FrobeniusStructure) -> np.ndarray:
    """``gamma o delta^dagger`` as a ``(d, d)`` effect on ``A (x) A``."""
    return np.einsum("k,abk->ab", s.gamma, s.delta.conj())


def dualiser_from_epsilon(s: FrobeniusStructure, epsilon) -> np.ndarray:
    """``d = (gamma (x) 1)(delta^dagger (x) 1)(1 (x) eps^dagger)``, a map ``A -> A*``."""
    eps = _arr(epsilon, (s.dim, s.dim), "epsilon")
    return np.einsum("ia,aj->ji", induced_epsilon_selfdual(s), eps.conj())


def epsilon_from_dualiser(s: BasisStructure, dualiser=None) -> np.ndarray:
    """``eps = gamma o delta^dagger o (1 (x) d^dagger)``."""
    d = s.dualiser if dualiser is None else _arr(dualiser, (s.dim, s.dim), "dualiser")
    return np.einsum("im,jm->ij", induced_epsilon_selfdual(s), d.conj())


def dual_structure(s: BasisStructure) -> BasisStructure:
    """The structure carried by ``A*``: delta and gamma transported along d, dualiser d^dagger."""
    d = s.dualiser
    dd = d.conj().T
    delta = np.einsum("ax,by,xyz,zi->abi", d, d, s.delta, dd)
    gamma = s.gamma @ dd
    return BasisStructure(s.dim, delta, gamma, (s.name + "*") if s.name else "", dd)


# ---------------------------------------------------------- conjugation


def conjugate_by_unitary(s: FrobeniusStructure, U, name: str = "") -> BasisStructure:
    """``((U (x) U) delta U^dagger, gamma U^dagger)`` with its dualiser recomputed."""
    U = _arr(U, (s.dim, s.dim), "U")
    if not is_unitary(U):
        raise NotUnitary("conjugating matrix is not unitary")
    delta = np.einsum("ax,by,xyz,iz->abi", U, U, s.delta, U.conj())
    gamma = np.einsum("z,iz->i", s.gamma, U.conj())
    return BasisStructure(s.dim, delta, gamma, name)


def lower_star(U) -> np.ndarray:
    """Entrywise conjugate in the fixed bases."""
    return np.asarray(U, dtype=np.complex128).conj()


def same_induced_epsilon(s1: FrobeniusStructure, s2: FrobeniusStructure, tol: float = TOL) -> bool:
    return max_dev(induced_epsilon_selfdual(s1), induced_epsilon_selfdual(s2)) <= tol


def is_real(U, tol: float = STAR_TOL) -> bool:
    return max_dev(lower_star(U), U) <= tol


# ------------------------------------------------------------ map classes


def _map(f, sA: FrobeniusStructure, sB: FrobeniusStructure) -> np.ndarray:
    return _arr(f, (sB.dim, sA.dim), "map")


def is_partial_map(f, sA: FrobeniusStructure, sB: FrobeniusStructure | None = None,
                   tol: float = TOL) -> bool:
    sB = sA if sB is None else sB
    f = _map(f, sA, sB)
    lhs = np.einsum("abk,ki->abi", sB.delta, f)
    rhs = np.einsum("ax,by,xyi->abi", f, f, sA.delta)
    return max_dev(lhs, rhs) <= tol


def is_total_map(f, sA: FrobeniusStructure, sB: FrobeniusStructure | None = None,
                 tol: float = TOL) -> bool:
    sB = sA if sB is None else sB
    f = _map(f, sA, sB)
    return is_partial_map(f, sA, sB, tol) and max_dev(sB.gamma @ f, sA.gamma) <= tol


def is_permutation(f, sA: FrobeniusStructure, sB: FrobeniusStructure | None = None,
                   tol: float = TOL) -> bool:
    sB = sA if sB is None else sB
    return is_total_map(f, sA, sB, tol) and is_unitary(f, tol)


def is_phase_map(f, s: FrobeniusStructure, tol: float = TOL) -> bool:
    """Both equalities ``(f (x) 1) delta = delta f = (1 (x) f) delta``."""
    f = _map(f, s, s)
    mid = np.einsum("abk,ki->abi", s.delta, f)
    left = np.einsum("ax,xbi->abi", f, s.delta)
    right = np.einsum("bx,axi->abi", f, s.delta)
    return max_dev(left, mid) <= tol and max_dev(right, mid) <= tol


# ----------------------------------------------------------- composites


def tensor_structures(sA: BasisStructure, sB: BasisStructure) -> BasisStructure:
    """Structure on ``A (x) B`` with ``d = (d_B (x) d_A) o swap``.

    The dual ``(A (x) B)* = B* (x) A*`` is flattened in that order, so the
    induced pairing is the nested cup rather than the flat identity.
    """
    a, b = sA.dim, sB.dim
    n = a * b
    delta = np.einsum("xzi,ywj->xyzwij", sA.delta, sB.delta).reshape(n, n, n)
    gamma = np.kron(sA.gamma, sB.gamma)
    dual = np.einsum("kj,li->klij", sB.dualiser, sA.dualiser).reshape(n, n)
    name = f"{sA.name}{sB.name}" if sA.name and sB.name else ""
    return BasisStructure(n, delta, gamma, name, dual)


def nested_cup_epsilon(a: int, b: int) -> np.ndarray:
    """``eps_A o (1 (x) eps_B (x) 1)`` on ``A (x) B (x) B* (x) A*`` as an (ab, ba) matrix."""
    eA, eB = ambient_epsilon(a), ambient_epsilon(b)
    return np.einsum("il,jk->ijkl", eA, eB).reshape(a * b, b * a)


def info_flow_check(s: BasisStructure, epsilon=None) -> LawReport:
    """Residuals of ``(d^dag (x) 1) eps_{A*}^dag = delta gamma^dag = (1 (x) d^dag) eps_A^dag``."""
    eps = epsilon_from_dualiser(s) if epsilon is None else _arr(epsilon, (s.dim, s.dim))
    d = s.dualiser
    # eps_{A*} = eps_A o swap, so its dagger is indexed [A*, A]
    left = np.einsum("jm,ij->mi", d.conj(), eps.conj())
    middle = np.einsum("abk,k->ab", s.delta, s.gamma.conj())
    right = np.einsum("jm,ij->im", d.conj(), eps.conj())
    return LawReport({
        "left": max_dev(left, middle),
        "right": max_dev(right, middle),
    })


# ------------------------------------------------------------- theta scan


def theta_structure(theta: float) -> BasisStructure:
    """Y-axis structure whose second copyable vector carries the phase ``e^{i theta}``."""
    B = _BASES["Y"].astype(np.complex128).copy()
    B[:, 1] *= np.exp(1j * theta)
    return from_basis(B, name=f"Y[{theta:.4f}]")


@dataclass
class ThetaScan:
    thetas: np.ndarray
    deviations: np.ndarray

    @property
    def min_deviation(self) -> float:
        return float(self.deviations.min())

    @property
    def argmin(self) -> float:
        return float(self.thetas[int(self.deviations.argmin())])


def theta_deviation(theta: float) -> float:
    s = theta_structure(theta)
    state = np.einsum("abk,k->ab", s.delta, s.gamma.conj()).reshape(-1)
    target = ambient_epsilon(2).conj().reshape(-1)
    return max_dev(state, target)


def theta_family_scan(n_samples: int) -> ThetaScan:
    """Scan ``theta`` uniformly over ``[0, 2 pi)`` for a factorisation of the pairing."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    thetas = 2 * np.pi * np.arange(n_samples) / n_samples
    return ThetaScan(thetas, np.array([theta_deviation(t) for t in thetas]))
