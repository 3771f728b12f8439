"""Phase 2-cocycles on a uniform ℝ-grid and their trivialization.

A grid cocycle is a table λ(s, t) of unimodular values on
[-R, R]² ∩ δℤ², normalized along the axes and satisfying the associativity
identity λ(s,t)λ(s+t,u) = λ(t,u)λ(s,t+u) on in-range triples (up to a
declared defect). ``trivialize`` produces a 1-cochain μ with coboundary
∂μ(s,t) = μ(s)μ(t)·conj(μ(s+t)) matching λ up to O(δ):

1. rescale by the largest ε = 2^-m keeping λ within distance 2^-½ of 1 on
   the unit square (pure index relabeling; steps must be powers of 1/2);
2. develop a cochain μ⁰ segment by segment so λ¹ = ∂μ⁰·λ is 1-periodic in
   its first slot;
3. average the phase of λ¹ over one period (trapezoid rule) and absorb it
   into μ¹, flattening λ² = conj(∂μ¹)·λ¹ to 1 on half the square;
4. relabel the half square to a full one and develop once more (μ²).

Unwinding gives μ = conj(μ⁰)·μ¹·conj(μ²) at the original grid indices.
The usable window shrinks by roughly one rescaled unit per development
stage; pairs that fall outside are counted, never silently dropped. A
unimodularity or associativity failure beyond the allowed defect is an
error before any stage runs — a near-(-1) value of λ¹ as well, since the
principal phase branch would be meaningless there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BRANCH_MARGIN = 1e-6
MODULUS_TOL = 1e-12
DEFECT_FACTOR = 10.0


def _half_index(step: float, half_range: float) -> int:
    k = round(half_range / step)
    if k < 1 or abs(k * step - half_range) > 1e-9:
        raise ValueError("half_range must be a positive multiple of step")
    return k


@dataclass
class CocycleGrid:
    """Unimodular λ on the index square [-K, K]², K = half_range/step."""

    step: float
    half_range: float
    values: np.ndarray
    in_window: np.ndarray | None = None

    def __post_init__(self):
        self.step = float(self.step)
        self.half_range = float(self.half_range)
        k = _half_index(self.step, self.half_range)
        self.half_index_count = k
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (2 * k + 1, 2 * k + 1):
            raise ValueError(f"values must be {(2 * k + 1, 2 * k + 1)}, got {vals.shape}")
        self.values = vals
        if self.in_window is None:
            self.in_window = np.ones(vals.shape, dtype=bool)
        else:
            self.in_window = np.asarray(self.in_window, dtype=bool)
            if self.in_window.shape != vals.shape:
                raise ValueError("window mask shape mismatch")
        win = self.in_window
        bad = np.max(np.abs(np.abs(vals[win]) - 1.0)) if win.any() else 0.0
        if bad > MODULUS_TOL:
            raise ValueError(f"values are not unimodular (worst defect {bad:.3e})")
        # normalization along the axes through 0
        row = np.abs(vals[k, :][win[k, :]] - 1.0)
        col = np.abs(vals[:, k][win[:, k]] - 1.0)
        norm_bad = max(row.max() if row.size else 0.0, col.max() if col.size else 0.0)
        if norm_bad > MODULUS_TOL:
            raise ValueError(f"cocycle not normalized: λ(·,0) or λ(0,·) differs "
                             f"from 1 by {norm_bad:.3e}")

    def lam(self, i: int, j: int) -> complex | None:
        k = self.half_index_count
        if abs(i) > k or abs(j) > k or not self.in_window[i + k, j + k]:
            return None
        return complex(self.values[i + k, j + k])


@dataclass
class Cochain:
    """Unimodular μ on [-R, R] ∩ δℤ with μ(0) = 1."""

    step: float
    half_range: float
    values: np.ndarray

    def __post_init__(self):
        self.step = float(self.step)
        self.half_range = float(self.half_range)
        k = _half_index(self.step, self.half_range)
        self.half_index_count = k
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (2 * k + 1,):
            raise ValueError(f"values must have length {2 * k + 1}")
        self.values = vals
        if np.max(np.abs(np.abs(vals) - 1.0)) > MODULUS_TOL:
            raise ValueError("cochain values are not unimodular")
        if abs(vals[k] - 1.0) > MODULUS_TOL:
            raise ValueError("cochain must satisfy μ(0) = 1")

    def mu(self, i: int) -> complex:
        return complex(self.values[i + self.half_index_count])


@dataclass
class CocycleReport:
    max_identity_residual: float
    max_normalization_residual: float
    checked: int
    skipped: int
    step: float
    half_range: float


def check_cocycle(grid: CocycleGrid) -> CocycleReport:
    """Exhaustive associativity scan over all in-range triples.

    A triple (i, j, k) is in range when every entry the identity touches
    — (i,j), (i+j,k), (j,k), (i,j+k) — lies on the grid; triples that are
    in range but hit a masked entry are counted as skipped. The second
    residual measures the normalization λ(0,·) = λ(·,0) = 1.
    """
    k = grid.half_index_count
    v, win = grid.values, grid.in_window
    row = np.abs(v[k, :][win[k, :]] - 1.0)
    col = np.abs(v[:, k][win[:, k]] - 1.0)
    norm_bad = float(max(row.max() if row.size else 0.0,
                         col.max() if col.size else 0.0))
    idx = np.arange(-k, k + 1)
    worst = 0.0
    checked = 0
    skipped = 0
    for i in idx:
        j_lo, j_hi = max(-k, -k - i), min(k, k - i)      # keep |i+j| ≤ k
        if j_lo > j_hi:
            continue
        j = np.arange(j_lo, j_hi + 1)[:, None]
        kk = idx[None, :]
        jk = j + kk
        valid = np.abs(jk) <= k
        jk_c = np.clip(jk, -k, k)
        lam_ij = v[i + k, j + k]
        lam_ijk = v[(i + j) + k, kk + k]
        lam_jk = v[j + k, kk + k]
        lam_ijk2 = v[i + k, jk_c + k]
        usable = (valid & win[i + k, j + k] & win[(i + j) + k, kk + k]
                  & win[j + k, kk + k] & win[i + k, jk_c + k])
        resid = np.abs(lam_ij * lam_ijk - lam_jk * lam_ijk2)
        if usable.any():
            worst = max(worst, float(resid[usable].max()))
        checked += int(usable.sum())
        skipped += int((valid & ~usable).sum())
    return CocycleReport(max_identity_residual=worst, max_normalization_residual=norm_bad,
                         checked=checked, skipped=skipped,
                         step=grid.step, half_range=grid.half_range)


def coboundary_of(chain: Cochain) -> CocycleGrid:
    """∂μ(s,t) = μ(s)μ(t)·conj(μ(s+t)); entries with s+t off the grid are
    masked out-of-window, not invented."""
    k = chain.half_index_count
    mu = chain.values
    i = np.arange(-k, k + 1)
    s = i[:, None] + i[None, :]
    ok = np.abs(s) <= k
    sc = np.clip(s, -k, k)
    vals = mu[i + k][:, None] * mu[i + k][None, :] * np.conj(mu[sc + k])
    vals = np.where(ok, vals, 1.0)
    return CocycleGrid(step=chain.step, half_range=chain.half_range,
                       values=vals, in_window=ok)


# -- trivialization ---------------------------------------------------------------

@dataclass
class TrivializationResult:
    chain: Cochain
    achieved_residual: float
    pairs_checked: int
    pairs_skipped: int
    rescale_exponent: int
    precheck: CocycleReport
    stage_windows: dict = field(default_factory=dict)
    stage_chains: dict = field(default_factory=dict)


def _develop(lam_lookup, k: int, unit: int) -> np.ndarray:
    """Solve μ(n+t) = μ(n)·λ(n,t) outward from μ ≡ 1 on [0,1].

    ``unit`` is the number of grid steps per 1.0 in the current
    coordinates. Entries that cannot be reached (a lookup leaves the
    window) stay NaN and shrink the usable window.
    """
    mu = np.full(2 * k + 1, np.nan + 0j, dtype=complex)
    mu[k:k + unit + 1] = 1.0
    # positive direction
    n = 1
    while n * unit <= k:
        base = n * unit
        anchor = mu[k + base]
        if np.isnan(anchor):
            break
        stopped = False
        for o in range(1, unit + 1):
            if base + o > k:
                stopped = True
                break
            lam = lam_lookup(base, o)
            if lam is None:
                stopped = True
                break
            mu[k + base + o] = anchor * lam
        if stopped:
            break
        n += 1
    # negative direction
    n = 1
    while n * unit <= k:
        base = -n * unit
        lam_unit = lam_lookup(base, unit)
        prev = mu[k + base + unit]
        if lam_unit is None or np.isnan(prev):
            break
        mu[k + base] = prev * np.conj(lam_unit)
        good = True
        for o in range(1, unit):
            lam = lam_lookup(base, o)
            if lam is None:
                good = False
                break
            mu[k + base + o] = mu[k + base] * lam
        if not good:
            break
        n += 1
    return mu


def trivialize(grid: CocycleGrid, defect_factor: float = DEFECT_FACTOR) -> TrivializationResult:
    """Produce μ with ∂μ ≈ λ; see the module docstring for the stages."""
    delta = grid.step
    k = grid.half_index_count
    log_inv = math.log2(1.0 / delta)
    k_exp = round(log_inv)
    if abs(log_inv - k_exp) > 1e-9 or k_exp < 1:
        raise ValueError("step must be a power of 1/2 for the halving stage")

    pre = check_cocycle(grid)
    allowed = defect_factor * delta
    if pre.max_identity_residual > allowed:
        raise ValueError(f"cocycle identity fails: residual {pre.max_identity_residual:.3e} "
                         f"exceeds the allowed defect {allowed:.3e}")

    # rescale: largest ε = 2^-m with |λ-1| ≤ 2^-1/2 on [0, ε]², leaving an
    # even number of grid steps per rescaled unit
    m = None
    for cand in range(0, k_exp):
        unit_c = 2 ** (k_exp - cand)
        if 2 * unit_c > k or unit_c < 2:        # window must hold two rescaled units
            continue
        sub = grid.values[k:k + unit_c + 1, k:k + unit_c + 1]
        subw = grid.in_window[k:k + unit_c + 1, k:k + unit_c + 1]
        if not subw.all():
            continue
        if np.max(np.abs(sub - 1.0)) <= 2 ** -0.5:
            m = cand
            break
    if m is None:
        raise ValueError("no admissible rescale: λ stays too far from 1 on every "
                         "dyadic square this grid resolves; refine the grid")
    unit = 2 ** (k_exp - m)

    # stage 1: develop μ⁰ against λ itself
    mu0 = _develop(grid.lam, k, unit)
    v0 = ~np.isnan(mu0)

    def lam1(i: int, j: int) -> complex | None:
        """∂μ⁰·λ with the first slot reduced to [0, unit) by its periodicity."""
        i = i % unit
        for b in (i, j, i + j):
            if abs(b) > k or np.isnan(mu0[k + b]):
                return None
        lam = grid.lam(i, j)
        if lam is None:
            return None
        return complex(mu0[k + i] * mu0[k + j] * np.conj(mu0[k + i + j]) * lam)

    # stage 2: phase average over one period
    table = np.empty((unit + 1, unit + 1), dtype=complex)
    for a in range(unit + 1):
        for b in range(unit + 1):
            val = lam1(a, b)
            if val is None:
                raise ValueError("rescaled unit square leaves the window; grid too small")
            table[a, b] = val
    if np.min(np.abs(table + 1.0)) < BRANCH_MARGIN:
        raise ValueError("branch margin violated — refine grid")
    phases = np.angle(table)
    dprime = 1.0 / unit
    alpha = dprime * (0.5 * phases[0, :] + phases[1:-1, :].sum(axis=0) + 0.5 * phases[-1, :])

    mu1 = np.full(2 * k + 1, np.nan + 0j, dtype=complex)
    seg = np.exp(1j * alpha)                     # μ¹ on [0, 1]
    top = seg[-1]
    for n in range(-(k // unit) - 1, k // unit + 2):
        for o in range(unit):
            idxp = n * unit + o
            if -k <= idxp <= k:
                mu1[k + idxp] = seg[o] * top ** n

    def lam2(i: int, j: int) -> complex | None:
        for b in (i, j, i + j):
            if abs(b) > k:
                return None
        base = lam1(i, j)
        if base is None:
            return None
        return complex(np.conj(mu1[k + i] * mu1[k + j]) * mu1[k + i + j] * base)

    # stage 3: halve coordinates (pure relabeling) and develop once more
    unit2 = unit // 2
    mu2 = _develop(lam2, k, unit2)
    v2 = ~np.isnan(mu2)

    valid = v0 & v2 & ~np.isnan(mu1)
    mu_total = np.where(valid, np.conj(mu0) * mu1 * np.conj(mu2), np.nan + 0j)

    # largest symmetric window of valid entries around 0
    kf = 0
    while kf + 1 <= k and valid[k + kf + 1] and valid[k - kf - 1]:
        kf += 1
    mu_win = mu_total[k - kf:k + kf + 1]
    mu_win = mu_win / np.abs(mu_win)             # renormalize fp drift in modulus
    chain = Cochain(step=delta, half_range=kf * delta, values=mu_win)

    # final residual over pairs staying inside the window
    ii = np.arange(-kf, kf + 1)
    s = ii[:, None] + ii[None, :]
    ok = np.abs(s) <= kf
    sc = np.clip(s, -kf, kf)
    bdry = mu_win[ii + kf][:, None] * mu_win[ii + kf][None, :] * np.conj(mu_win[sc + kf])
    lam_tab = grid.values[k - kf:k + kf + 1, k - kf:k + kf + 1]
    lam_ok = grid.in_window[k - kf:k + kf + 1, k - kf:k + kf + 1]
    usable = ok & lam_ok
    resid = float(np.max(np.abs(lam_tab - bdry)[usable])) if usable.any() else float("nan")
    skipped_pairs = int((~usable).sum()) + int((2 * k + 1) ** 2 - (2 * kf + 1) ** 2)

    return TrivializationResult(
        chain=chain, achieved_residual=resid,
        pairs_checked=int(usable.sum()), pairs_skipped=skipped_pairs,
        rescale_exponent=m, precheck=pre,
        stage_windows={"mu0_valid": int(v0.sum()), "mu2_valid": int(v2.sum()),
                       "final_half_index": kf, "unit": unit},
        stage_chains={"mu0": mu0, "mu1": mu1, "mu2": mu2})


# -- ready-made families and comparison helpers ------------------------------------

def bilinear_cocycle(c: float, step: float, half_range: float) -> CocycleGrid:
    """λ(s,t) = e^{-i·c·s·t}, an exact cocycle with closed-form trivializer
    μ(t) = e^{i·c·t²/2}."""
    k = _half_index(step, half_range)
    x = np.arange(-k, k + 1) * step
    vals = np.exp(-1j * c * np.outer(x, x))
    return CocycleGrid(step=step, half_range=half_range, values=vals)


def bilinear_trivializer(c: float, step: float, half_range: float) -> Cochain:
    k = _half_index(step, half_range)
    x = np.arange(-k, k + 1) * step
    return Cochain(step=step, half_range=half_range, values=np.exp(0.5j * c * x * x))


def character_quotient_gap(a: Cochain, b: Cochain) -> tuple[float, float]:
    """Distance between two cochains modulo characters t ↦ e^{iκt}.

    Returns (κ̂, max |a·conj(b) − e^{iκ̂t}|) on the common window: two
    trivializers of the same cocycle should differ by a character only.
    """
    if abs(a.step - b.step) > 1e-12:
        raise ValueError("cochains live on different grids")
    kc = min(a.half_index_count, b.half_index_count)
    ka, kb = a.half_index_count, b.half_index_count
    r = a.values[ka - kc:ka + kc + 1] * np.conj(b.values[kb - kc:kb + kc + 1])
    incr = np.angle(r[1:] * np.conj(r[:-1]))
    kappa = float(np.mean(incr)) / a.step
    x = np.arange(-kc, kc + 1) * a.step
    gap = float(np.max(np.abs(r - np.exp(1j * kappa * x))))
    return kappa, gap
