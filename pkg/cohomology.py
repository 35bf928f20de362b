"""
Cochain complex g -> g^X -> g^R of a representation, numeric ranks and
the dimensions of H^0, Z^1, B^1, H^1 and H^2
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from config import Tolerances, resolve
from presentation import fox_derivative
from rep import Representation, Cocycle, evaluate_group_ring, require_valid


log = logging.getLogger(__name__)

EXACT_SINGLE_RELATOR = 'exact_single_relator'
EXACT_DUALITY = 'exact_duality'
EXACT_FREE = 'exact_free'
COKER_BOUND = 'coker_bound'

MULTI_RELATOR_CAVEAT = (
    "H^2 is reported as dim coker(d2), an upper bound: coker(d2) equals H^2 only when "
    "Hom(N, g)^Pi is isomorphic to g^R, i.e. when ev_R is onto; relations among "
    "relators are not computed"
)


@dataclass
class RankDecision:
    """Outcome of one numeric rank computation"""

    rank: int
    singular_values: np.ndarray
    cutoff: float
    smallest_kept: Optional[float]
    largest_dropped: Optional[float]

    @property
    def gap_ratio(self) -> float:
        """smallest kept / largest dropped; inf when either side is empty or the dropped part is exactly 0"""
        if self.smallest_kept is None or self.largest_dropped is None:
            return float('inf')
        if self.largest_dropped == 0:
            return float('inf')
        return self.smallest_kept / self.largest_dropped

    def warning(self, threshold: float) -> bool:
        return self.gap_ratio < threshold

    def to_dict(self) -> Dict[str, object]:
        ratio = self.gap_ratio
        return {
            'rank': self.rank,
            'cutoff': self.cutoff,
            'smallest_kept': self.smallest_kept,
            'largest_dropped': self.largest_dropped,
            'gap_ratio': None if ratio == float('inf') else ratio,
        }


def numeric_rank(matrix: np.ndarray, tol: Optional[Tolerances] = None) -> RankDecision:
    """Rank by counting singular values above rank_rel * sigma_max"""
    tol = resolve(tol)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.size == 0:
        return RankDecision(0, np.zeros(0), tol.rank_floor, None, None)
    sigma = np.linalg.svd(matrix, compute_uv=False)
    sigma_max = float(sigma[0]) if sigma.size else 0.0
    cutoff = tol.rank_rel * sigma_max if sigma_max > 0 else tol.rank_floor
    kept = sigma[sigma > cutoff]
    dropped = sigma[sigma <= cutoff]
    decision = RankDecision(
        rank=int(kept.size),
        singular_values=sigma,
        cutoff=cutoff,
        smallest_kept=float(kept[-1]) if kept.size else None,
        largest_dropped=float(dropped[0]) if dropped.size else None,
    )
    if decision.warning(tol.gap_warning):
        log.warning("rank decision with small singular value gap: rank %d, ratio %.3g",
                    decision.rank, decision.gap_ratio)
    return decision


def _normalize_phases(basis: np.ndarray) -> np.ndarray:
    """Make the largest-modulus entry of every column real and positive"""
    basis = np.array(basis, dtype=complex)
    for k in range(basis.shape[1]):
        column = basis[:, k]
        pivot = int(np.argmax(np.abs(column) > np.abs(column).max() * (1 - 1e-9)))
        if abs(column[pivot]) > 0:
            basis[:, k] = column * (abs(column[pivot]) / column[pivot])
    return basis


def kernel_basis(matrix: np.ndarray, columns: int, tol: Optional[Tolerances] = None) -> np.ndarray:
    """Orthonormal kernel basis from the right singular vectors of (numerically) zero singular values"""
    if columns == 0:
        return np.zeros((0, 0), dtype=complex)
    matrix = np.asarray(matrix, dtype=complex).reshape(-1, columns)
    if matrix.shape[0] == 0:
        return np.eye(columns, dtype=complex)
    rank = numeric_rank(matrix, tol).rank
    _, _, vh = np.linalg.svd(matrix, full_matrices=True)
    return _normalize_phases(vh[rank:].conj().T)


def cokernel_basis(matrix: np.ndarray, rows: int, tol: Optional[Tolerances] = None) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the image"""
    if rows == 0:
        return np.zeros((0, 0), dtype=complex)
    matrix = np.asarray(matrix, dtype=complex).reshape(rows, -1)
    if matrix.shape[1] == 0:
        return np.eye(rows, dtype=complex)
    rank = numeric_rank(matrix, tol).rank
    u, _, _ = np.linalg.svd(matrix, full_matrices=True)
    return _normalize_phases(u[:, rank:])


def image_basis(matrix: np.ndarray, tol: Optional[Tolerances] = None) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.size == 0:
        return np.zeros((matrix.shape[0], 0), dtype=complex)
    rank = numeric_rank(matrix, tol).rank
    u, _, _ = np.linalg.svd(matrix, full_matrices=False)
    return u[:, :rank]


def intersect_kernels(operators: Sequence[np.ndarray], dim: int,
                      tol: Optional[Tolerances] = None) -> np.ndarray:
    """Orthonormal basis of the common kernel of square operators"""
    if not operators:
        return np.eye(dim, dtype=complex)
    return kernel_basis(np.vstack(operators), dim, tol)


@dataclass
class CochainComplex:
    """d1: (d*m) x m, d2: (q*m) x (d*m); block (j, i) of d2 is Ad(phi(d_i r_j))"""

    d1: np.ndarray
    d2: np.ndarray
    lie_dim: int
    generator_count: int
    relator_count: int
    tolerance: Tolerances
    chain_residual: float = 0.0

    @property
    def chain_ok(self) -> bool:
        scale = np.linalg.norm(self.d2) * np.linalg.norm(self.d1)
        return self.chain_residual <= self.tolerance.chain * max(scale, 1e-300) or self.chain_residual == 0

    def restricted(self, indices: Sequence[int]) -> "CochainComplex":
        """Subcomplex on a set of basis coordinates preserved by every Ad (e.g. the semisimple part)"""
        m, d, q = self.lie_dim, self.generator_count, self.relator_count
        idx = np.asarray(indices, dtype=int)
        cols_x = np.concatenate([i * m + idx for i in range(d)]) if d else np.zeros(0, dtype=int)
        rows_r = np.concatenate([j * m + idx for j in range(q)]) if q else np.zeros(0, dtype=int)
        d1 = self.d1[np.ix_(cols_x, idx)]
        d2 = self.d2[np.ix_(rows_r, cols_x)]
        return CochainComplex(d1, d2, len(idx), d, q, self.tolerance,
                              float(np.linalg.norm(d2 @ d1)) if d2.size and d1.size else 0.0)


def build_complex(rep: Representation, tol: Optional[Tolerances] = None) -> CochainComplex:
    tol = resolve(tol)
    require_valid(rep, tol)
    m = rep.lie_dim
    d = rep.presentation.generator_count
    q = rep.presentation.relator_count
    identity = np.eye(m, dtype=complex)

    # d1 xi = (Ad_i - I) xi stacked over generators
    d1 = np.vstack([op.matrix - identity for op in rep.adjoint_images]) if d else np.zeros((0, m), dtype=complex)
    d2 = np.zeros((q * m, d * m), dtype=complex)
    # block (j, i) is Ad applied to the Fox derivative of relator j in generator i
    for j, rel in enumerate(rep.presentation.relators):
        for i in range(d):
            block = evaluate_group_ring(rep, fox_derivative(rel, i, d))
            d2[j * m:(j + 1) * m, i * m:(i + 1) * m] = block.matrix

    residual = float(np.linalg.norm(d2 @ d1)) if d2.size and d1.size else 0.0
    complex_ = CochainComplex(d1, d2, m, d, q, tol, residual)
    log.debug("assembled cochain complex: d1 %s, d2 %s, chain residual %.3g",
              d1.shape, d2.shape, residual)
    if not complex_.chain_ok:
        log.warning("d2 d1 = 0 fails: residual %.3g", residual)
    return complex_


@dataclass
class BettiNumbers:
    b0: int
    b1: int
    b2: int
    z1_dim: int
    rank_d1: int
    rank_d2: int

    @property
    def euler(self) -> int:
        return self.b0 - self.b1 + self.b2


def _betti(cx: CochainComplex) -> Dict[str, object]:
    m, d, q = cx.lie_dim, cx.generator_count, cx.relator_count
    r1 = numeric_rank(cx.d1, cx.tolerance)
    r2 = numeric_rank(cx.d2, cx.tolerance)
    z1 = d * m - r2.rank
    numbers = BettiNumbers(
        b0=m - r1.rank,
        b1=z1 - r1.rank,
        b2=q * m - r2.rank,
        z1_dim=z1,
        rank_d1=r1.rank,
        rank_d2=r2.rank,
    )
    return {'numbers': numbers, 'd1': r1, 'd2': r2}


@dataclass
class CohomologyReport:
    """Dimensions, rank diagnostics and explicit bases for one representation"""

    b0: int
    b1: int
    b2: int
    b2_status: str
    rank_d1: int
    rank_d2: int
    z1_dim: int
    b1_dim_coboundaries: int
    lie_dim: int
    generator_count: int
    relator_count: int
    singular_gaps: Dict[str, RankDecision]
    h0_basis: np.ndarray
    z1_basis: np.ndarray
    h1_basis: np.ndarray
    h2_basis: np.ndarray
    semisimple: Optional[BettiNumbers]
    chain_residual: float
    tolerance: Tolerances
    warnings: List[str] = field(default_factory=list)

    @property
    def euler(self) -> int:
        return self.b0 - self.b1 + self.b2

    @property
    def semisimple_b0(self) -> int:
        return self.semisimple.b0 if self.semisimple is not None else self.b0

    @property
    def semisimple_b2(self) -> int:
        return self.semisimple.b2 if self.semisimple is not None else self.b2

    def gap_warnings(self) -> List[str]:
        return [w for w in self.warnings if w.startswith('rank gap')]


def cohomology_report(rep: Representation, tol: Optional[Tolerances] = None) -> CohomologyReport:
    tol = resolve(tol)
    cx = build_complex(rep, tol)
    m, d, q = cx.lie_dim, cx.generator_count, cx.relator_count
    computed = _betti(cx)
    numbers: BettiNumbers = computed['numbers']

    warnings: List[str] = []
    gaps = {'d1': computed['d1'], 'd2': computed['d2']}
    for name, decision in gaps.items():
        if decision.warning(tol.gap_warning):
            warnings.append(
                f"rank gap: {name} rank {decision.rank} decided with singular value ratio "
                f"{decision.gap_ratio:.3g} < {tol.gap_warning:g}"
            )

    if q == 0:
        status = EXACT_FREE
    elif q == 1:
        status = EXACT_SINGLE_RELATOR
    else:
        status = COKER_BOUND
        warnings.append(f"multi-relator presentation: b2 <= {numbers.b2}. {MULTI_RELATOR_CAVEAT}")

    if not cx.chain_ok:
        warnings.append(f"chain property d2 d1 = 0 violated: residual {cx.chain_residual:.3g}")

    h0 = kernel_basis(cx.d1, m, tol) if d else np.eye(m, dtype=complex)
    z1 = kernel_basis(cx.d2, d * m, tol)
    b1_image = image_basis(cx.d1, tol)
    if b1_image.shape[1]:
        coefficients = kernel_basis(b1_image.conj().T @ z1, z1.shape[1], tol)
        h1 = _normalize_phases(z1 @ coefficients)
    else:
        h1 = z1
    h2 = cokernel_basis(cx.d2, q * m, tol)

    semisimple = None
    if rep.spec.center_dim:
        semisimple = _betti(cx.restricted(rep.algebra.semisimple_indices))['numbers']

    report = CohomologyReport(
        b0=numbers.b0, b1=numbers.b1, b2=numbers.b2, b2_status=status,
        rank_d1=numbers.rank_d1, rank_d2=numbers.rank_d2, z1_dim=numbers.z1_dim,
        b1_dim_coboundaries=numbers.rank_d1,
        lie_dim=m, generator_count=d, relator_count=q,
        singular_gaps=gaps,
        h0_basis=h0, z1_basis=z1, h1_basis=h1, h2_basis=h2,
        semisimple=semisimple, chain_residual=cx.chain_residual,
        tolerance=tol, warnings=warnings,
    )
    log.info("cohomology: b0=%d b1=%d b2=%d (%s)", report.b0, report.b1, report.b2, status)
    return report


def cocycle_residual(rep: Representation, gamma: Cocycle, tol: Optional[Tolerances] = None) -> float:
    """||d2 gamma|| / ||gamma||, i.e. the size of gamma extended to the relators"""
    cx = build_complex(rep, tol)
    norm = np.linalg.norm(gamma.vector)
    if cx.d2.size == 0 or norm == 0:
        return 0.0
    return float(np.linalg.norm(cx.d2 @ gamma.vector) / norm)


def h1_cocycles(report: CohomologyReport) -> List[Cocycle]:
    return [Cocycle.from_vector(report.h1_basis[:, k], report.lie_dim)
            for k in range(report.h1_basis.shape[1])]


@dataclass
class RankTheoremNote:
    """How rank(d2) compares with dim Hom(N, g)^Pi - dim H^2"""

    rank_d2: int
    relator_count: int
    lie_dim: int
    b2: int
    implied_hom_dim: Optional[int]
    hom_dim_bound: Optional[int]
    matches_single_relator_claim: Optional[bool]
    annotations: List[str] = field(default_factory=list)


def rank_theorem_report(rep: Representation, tol: Optional[Tolerances] = None) -> RankTheoremNote:
    report = cohomology_report(rep, tol)
    m, q = report.lie_dim, report.relator_count
    annotations = [
        "Delta (the Eilenberg-MacLane obstruction) is not computed",
        "ev_R: Hom(N, g)^Pi -> g^R is not computed; its surjectivity is what makes coker(d2) = H^2",
        "the degree-3 term of the free resolution is not constructed",
    ]
    if q == 0:
        annotations.append("free group: N is trivial and Hom(N, g)^Pi = 0")
        return RankTheoremNote(report.rank_d2, q, m, 0, 0, 0, None, annotations)
    if q == 1:
        implied = report.rank_d2 + report.b2
        return RankTheoremNote(report.rank_d2, q, m, report.b2, implied, None, implied == m, annotations)
    annotations.append(f"dim Hom(N, g)^Pi <= {q * m} = q * dim g")
    return RankTheoremNote(report.rank_d2, q, m, report.b2, None, q * m, None, annotations)
