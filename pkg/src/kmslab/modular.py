"""GNS representations and modular structure for faithful states.

The GNS space of a faithful density d is the algebra itself with
⟨a, b⟩ = Tr(d b* a), realized concretely as vectors Λ(a) = vec(a·d^{1/2}).
Two routes to the modular operator coexist on purpose:

* ``polar`` builds the conjugation S from its defining property
  S Λ(a) = Λ(a*), realifies it (S is antilinear), and takes the honest
  polar decomposition S = J Δ^{1/2};
* ``closed_form`` writes down Δ = left(d)·right(d⁻¹) and J = adjoint
  directly.

They are compared — never merged — in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgElement, BlockAlgebra, Functional, Projection, commutant_basis
from .flow import InnerFlow
from .kms import KmsState


class GnsTriple:
    """Hilbert space ℂ^N (N = Σ n_i²), representation, and cyclic vector."""

    def __init__(self, algebra: BlockAlgebra, state: Functional):
        if state.algebra != algebra:
            raise ValueError("state lives in a different algebra")
        if not state.is_faithful(1e-12):
            raise ValueError("density not strictly positive; the GNS inner product "
                             "would be degenerate (compress to the support first)")
        self.algebra = algebra
        self.state = state
        self.dim = algebra.coord_dim
        self.sqrt_blocks = []
        for d in state.density.blocks:
            w, u = np.linalg.eigh(d)
            self.sqrt_blocks.append((u * np.sqrt(np.maximum(w, 0.0))) @ u.conj().T)
        offs, off = [], 0
        for n in algebra.block_dims:
            offs.append(off)
            off += n * n
        self._offsets = offs

    def lambda_map(self, a: AlgElement) -> np.ndarray:
        """Λ(a) = vec(a·d^{1/2}), blockwise row-major."""
        return np.concatenate([(blk @ s).reshape(-1)
                               for blk, s in zip(a.blocks, self.sqrt_blocks)])

    def rep(self, a: AlgElement) -> np.ndarray:
        """Left multiplication in Λ-coordinates: blockdiag of a_i ⊗ I."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for blk, n, off in zip(a.blocks, self.algebra.block_dims, self._offsets):
            out[off:off + n * n, off:off + n * n] = np.kron(blk, np.eye(n))
        return out

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        """⟨u, v⟩, linear in u. Equals state(b* a) for u = Λ(a), v = Λ(b)."""
        return complex(np.vdot(v, u))

    def cyclic_vector(self) -> np.ndarray:
        return self.lambda_map(self.algebra.identity())

    def basis_matrix(self) -> np.ndarray:
        """Columns Λ(e_k) over the matrix-unit basis; invertible by faithfulness."""
        cols = [self.lambda_map(e) for e in self.algebra.basis()]
        return np.column_stack(cols)

    def adjoint_permutation(self) -> np.ndarray:
        """Real P with coords(a*) = P · conj(coords(a)): the blockwise transpose."""
        p = np.zeros((self.dim, self.dim))
        for n, off in zip(self.algebra.block_dims, self._offsets):
            for i in range(n):
                for j in range(n):
                    p[off + j * n + i, off + i * n + j] = 1.0
        return p


def gns(algebra: BlockAlgebra, omega: Functional) -> GnsTriple:
    return GnsTriple(algebra, omega)


@dataclass
class ModularData:
    """Modular operator Δ and conjugation J (as J v = conj_kernel · conj v)."""

    delta: np.ndarray
    conj_kernel: np.ndarray
    method: str
    linear_structure_residual: float
    antilinear_structure_residual: float

    def __post_init__(self):
        w, v = np.linalg.eigh(self.delta)
        if w[0] <= 0:
            raise ValueError(f"modular operator not positive (min eigenvalue {w[0]:.3e})")
        self._evals = w
        self._evecs = v

    def delta_power(self, z: complex) -> np.ndarray:
        """Δ^z through the spectral decomposition (z may be complex)."""
        pw = np.power(self._evals.astype(complex), z)
        return (self._evecs * pw) @ self._evecs.conj().T

    def flow_unitary(self, t: float) -> np.ndarray:
        return self.delta_power(1j * float(t))

    def apply_j(self, v: np.ndarray) -> np.ndarray:
        return self.conj_kernel @ np.conj(v)

    def conjugate_operator(self, x: np.ndarray) -> np.ndarray:
        """JxJ as a complex-linear matrix."""
        return self.conj_kernel @ np.conj(x) @ np.conj(self.conj_kernel)


def modular_data(g: GnsTriple, method: str = "polar") -> ModularData:
    if method == "closed_form":
        return _modular_closed_form(g)
    if method != "polar":
        raise ValueError(f"unknown method {method!r}")

    n = g.dim
    L = g.basis_matrix()
    P = g.adjoint_permutation()
    # S Λ(a) = Λ(a*) pins the antilinear kernel: S v = M_s · conj(v)
    m_s = L @ P @ np.conj(np.linalg.inv(L))

    # realify ℂ^N ≅ ℝ^{2N}; an antilinear map v ↦ M conj(v) becomes
    # [[Re M, Im M], [Im M, -Re M]]
    s_real = np.block([[m_s.real, m_s.imag], [m_s.imag, -m_s.real]])
    delta_real = s_real.T @ s_real

    a = delta_real[:n, :n]
    b = delta_real[n:, :n]
    lin_resid = max(float(np.max(np.abs(delta_real[:n, n:] + b))),
                    float(np.max(np.abs(delta_real[n:, n:] - a))))
    delta = a + 1j * b

    w, v = np.linalg.eigh(delta_real)
    if w[0] <= 0:
        raise ValueError("polar route produced a non-positive quadratic form")
    inv_sqrt = (v / np.sqrt(w)) @ v.T
    j_real = s_real @ inv_sqrt

    ja = j_real[:n, :n]
    jb = j_real[:n, n:]
    anti_resid = max(float(np.max(np.abs(j_real[n:, :n] - jb))),
                     float(np.max(np.abs(j_real[n:, n:] + ja))))
    m_j = ja + 1j * jb
    return ModularData(delta=delta, conj_kernel=m_j, method="polar",
                       linear_structure_residual=lin_resid,
                       antilinear_structure_residual=anti_resid)


def _modular_closed_form(g: GnsTriple) -> ModularData:
    """Δ acts on m ∈ H by d·m·d⁻¹ and J by m ↦ m*; no polar step involved."""
    n = g.dim
    delta = np.zeros((n, n), dtype=complex)
    for d, nb, off in zip(g.state.density.blocks, g.algebra.block_dims, g._offsets):
        w, u = np.linalg.eigh(d)
        dinv = (u / w) @ u.conj().T
        delta[off:off + nb * nb, off:off + nb * nb] = np.kron(d, dinv.T)
    return ModularData(delta=delta, conj_kernel=g.adjoint_permutation().astype(complex),
                       method="closed_form",
                       linear_structure_residual=0.0, antilinear_structure_residual=0.0)


@dataclass
class ModularFlowReport:
    passed: bool
    max_residual: float
    beta: float
    samples: tuple[float, ...]

    def __str__(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] Δ^it vs flow at -βt: max residual {self.max_residual:.3e}"


DEFAULT_T_SAMPLES = (-2.7, -1.0, -0.3, 0.3, 1.0, 2.7)


def verify_modular_flow(flow: InnerFlow, psi: KmsState,
                        t_samples=DEFAULT_T_SAMPLES, tol: float = 1e-8) -> ModularFlowReport:
    """Check Δ^{it} π(a) Δ^{-it} = π(σ_{-βt}(a)) on a basis, for several t."""
    g = gns(flow.algebra, psi.functional)
    md = modular_data(g)
    worst = 0.0
    basis = flow.algebra.basis()
    for t in t_samples:
        u = md.flow_unitary(t)
        uinv = md.flow_unitary(-t)
        for a in basis:
            lhs = u @ g.rep(a) @ uinv
            rhs = g.rep(flow.evolve(a, -psi.beta * float(t)))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return ModularFlowReport(passed=bool(worst <= tol), max_residual=worst,
                             beta=psi.beta, samples=tuple(float(t) for t in t_samples))


def _orthonormal_span(mats: list[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    """Orthonormal projector onto span{vec(m)} via SVD rank truncation."""
    stack = np.column_stack([m.reshape(-1) for m in mats])
    u, s, _ = np.linalg.svd(stack, full_matrices=False)
    keep = s > tol * (s[0] if s.size else 1.0)
    basis = u[:, keep]
    return basis @ basis.conj().T


def commutant_gap(g: GnsTriple, md: ModularData) -> tuple[int, int, float]:
    """(dim π(A), dim π(A)′, projector gap between J π(A) J and π(A)′)."""
    reps = [g.rep(e) for e in g.algebra.basis()]
    comm = commutant_basis(reps, dim=g.dim)
    jimages = [md.conjugate_operator(x) for x in reps]
    p_comm = _orthonormal_span(comm)
    p_j = _orthonormal_span(jimages)
    gap = float(np.linalg.norm(p_comm - p_j, 2))
    return len(reps), len(comm), gap


def verify_commutant_theorem(g: GnsTriple, md: ModularData, tol: float = 1e-8) -> bool:
    """Does J π(A) J equal the commutant π(A)′ as a linear subspace?"""
    dim_rep, dim_comm, gap = commutant_gap(g, md)
    return bool(dim_rep == dim_comm and gap <= tol)


def center_dimension(g: GnsTriple) -> int:
    """dim(π(A) ∩ π(A)′); 1 means the GNS von Neumann algebra is a factor."""
    reps = [g.rep(e) for e in g.algebra.basis()]
    k = len(reps)
    rows = []
    for bl in reps:
        cols = [(bk @ bl - bl @ bk).reshape(-1) for bk in reps]
        rows.append(np.column_stack(cols))
    system = np.vstack(rows)
    s = np.linalg.svd(system, compute_uv=False)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    return k - int(np.sum(s > 1e-9 * scale))


def intertwining_unitary(p: Projection, q: Projection) -> AlgElement:
    """A unitary v with v q v* = p, built from x = qp + (1-q)(1-p).

    x intertwines (xp = qx), and ‖p - q‖ < 1 makes x invertible, so the
    unitary part of its polar decomposition does the job. Fails loudly at
    ‖p - q‖ ≥ 1 (e.g. orthogonal rank-one projections), where no such
    canonical choice exists.
    """
    if p.algebra != q.algebra:
        raise ValueError("projections live in different algebras")
    dist = (p.element - q.element).norm()
    if dist >= 1.0 - 1e-12:
        raise ValueError(f"‖p - q‖ = {dist:.6g} ≥ 1; projections are too far apart "
                         "for the canonical intertwiner")
    alg = p.algebra
    one = alg.identity()
    x = q.element @ p.element + (one - q.element) @ (one - p.element)
    # v = (x*x)^{-1/2} x* maps range(q) onto range(p)
    blocks = []
    for xb in x.blocks:
        w, u = np.linalg.eigh(xb.conj().T @ xb)
        if w[0] <= 1e-14:
            raise ValueError("intertwiner degenerate despite norm gap; projections "
                             "are numerically inconsistent")
        inv_sqrt = (u / np.sqrt(w)) @ u.conj().T
        blocks.append(inv_sqrt @ xb.conj().T)
    v = AlgElement(alg, blocks)
    resid = (v @ q.element @ v.adjoint() - p.element).norm()
    if resid > 1e-10:
        raise ValueError(f"intertwiner failed its own check (residual {resid:.3e})")
    return v
