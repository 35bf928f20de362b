"""
Classification of representations (simple, reductive, irreducible, good),
smooth point verdicts, expected dimensions and one-parameter family scans
"""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import expm

from config import Tolerances, resolve
from errors import ConvergenceError, EnumerationLimitError, InvalidRepresentationError
from presentation import Presentation
from rep import GroupSpec, Representation, require_valid
from cohomology import (
    CohomologyReport, MULTI_RELATOR_CAVEAT, cohomology_report, kernel_basis,
    numeric_rank,
)
from surfaces import (
    SurfaceKind, is_canonical_nonorientable, orientation_cover_presentation, restrict_to_subgroup,
    surface_kind,
)


log = logging.getLogger(__name__)

GOOD_YES = 'yes'
GOOD_NO = 'no'
GOOD_DIM_ONLY = 'dim_only'

SMOOTH = 'smooth'
NOT_DETERMINED = 'not_determined'

MAX_SIGN_GENERATORS = 16


@dataclass
class ReductivityCertificate:
    reductive: bool
    algebra_dim: int
    gram_spectrum: np.ndarray
    rounds: int

    def __bool__(self) -> bool:
        return self.reductive


@dataclass
class StabilizerReport:
    """Stabilizer of a representation into SL(2) or PSL(2), modulo nothing for SL and
    modulo +-I for PSL"""

    order: Optional[int]
    dimension: int
    elements: List[np.ndarray] = field(default_factory=list)
    sign_vectors: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def positive_dimensional(self) -> bool:
        return self.order is None


@dataclass
class Classification:
    simple: bool
    reductive: bool
    stabilizer_dim: int
    good: str
    smooth_verdict: str
    reason: str
    projective_stabilizer_order: Optional[int] = None
    reductive_certificate: Optional[ReductivityCertificate] = None
    hom_smooth: Optional[bool] = None
    hom_tangent_dim: Optional[int] = None
    hom_tangent_expected: Optional[int] = None
    local_dimension: Optional[int] = None
    expected_dimension: Optional[int] = None

    @property
    def irreducible(self) -> bool:
        return self.simple and self.reductive

    def to_dict(self) -> Dict[str, object]:
        cert = self.reductive_certificate
        return {
            'simple': self.simple,
            'reductive': self.reductive,
            'irreducible': self.irreducible,
            'stabilizer_dim': self.stabilizer_dim,
            'projective_stabilizer_order': self.projective_stabilizer_order,
            'good': self.good,
            'smooth_verdict': self.smooth_verdict,
            'reason': self.reason,
            'reductive_algebra_dim': cert.algebra_dim if cert is not None else None,
            'hom_smooth': self.hom_smooth,
            'hom_tangent_dim': self.hom_tangent_dim,
            'hom_tangent_expected': self.hom_tangent_expected,
            'local_dimension': self.local_dimension,
            'expected_dimension': self.expected_dimension,
        }


def is_simple(rep: Representation, tol: Optional[Tolerances] = None,
              report: Optional[CohomologyReport] = None) -> bool:
    """H^0 with semisimple coefficients vanishes"""
    report = report or cohomology_report(rep, tol)
    return report.semisimple_b0 == 0


def _orthonormal_span(vectors: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the given columns"""
    rank = numeric_rank(vectors, tol).rank
    u, _, _ = np.linalg.svd(vectors, full_matrices=False)
    return u[:, :rank]


def is_reductive(rep: Representation, tol: Optional[Tolerances] = None) -> ReductivityCertificate:
    """Trace form criterion on the associative algebra generated by the adjoint images.

    A is spanned by words in Ad(x_i) and their inverses. In characteristic zero the
    radical of A is the kernel of (U, V) -> tr(UV), so Ad is completely reducible
    iff that Gram matrix is nondegenerate.
    """
    tol = resolve(tol)
    require_valid(rep, tol)
    m = rep.lie_dim
    generators = [op.matrix for op in rep.adjoint_images] + [op.matrix for op in rep.adjoint_inverse_images]

    # start from the identity and multiply by generators until the span stops growing
    span = np.eye(m, dtype=complex).reshape(-1, 1) / np.sqrt(m)
    rounds = 0
    for rounds in range(1, m * m + 2):
        products = [span]
        for k in range(span.shape[1]):
            u = span[:, k].reshape(m, m)
            products.append(np.array([(u @ g).reshape(-1) for g in generators]).T)
        grown = _orthonormal_span(np.hstack(products), tol)
        if grown.shape[1] == span.shape[1]:
            break
        span = grown
    else:
        raise ConvergenceError(f"Adjoint algebra span did not stabilize within {m * m + 1} rounds")

    # Gram matrix of the trace form on the span
    matrices = [span[:, k].reshape(m, m) for k in range(span.shape[1])]
    gram = np.array([[np.trace(u @ v) for v in matrices] for u in matrices])
    decision = numeric_rank(gram, tol)
    reductive = decision.rank == len(matrices)
    log.debug("adjoint algebra of dimension %d, trace form rank %d", len(matrices), decision.rank)
    return ReductivityCertificate(reductive, len(matrices), decision.singular_values, rounds)


def _commutation_operator(a: np.ndarray, sign: int) -> np.ndarray:
    """vec(g a - sign a g) for row-major vec"""
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    return np.kron(eye, a.T) - sign * np.kron(a, eye)


def _generic_invertible(basis: np.ndarray, n: int) -> Optional[np.ndarray]:
    """An invertible element of the span, or None if the span has none generically"""
    rng = np.random.default_rng(0)
    weights = rng.normal(size=basis.shape[1]) + 1j * rng.normal(size=basis.shape[1])
    g = (basis @ weights).reshape(n, n)
    if abs(np.linalg.det(g)) > 1e-8 * np.linalg.norm(g) ** n:
        return g
    return None


def projective_stabilizer(rep: Representation, tol: Optional[Tolerances] = None) -> StabilizerReport:
    """Elements g with g A_i g^-1 = eps_i A_i over sign vectors eps (eps = all ones for SL).

    Counts SL(2) elements for SL and PSL(2) elements for PSL; returns order None and the
    solution dimension when some solution space is positive dimensional.
    """
    tol = resolve(tol)
    spec = rep.spec
    if spec.n != 2 or spec.kind not in ('SL', 'PSL'):
        raise ValueError(f"Stabilizer enumeration is only available for SL(2) and PSL(2), not {spec.label}")
    d = rep.presentation.generator_count
    if d > MAX_SIGN_GENERATORS:
        raise EnumerationLimitError(
            f"Sign enumeration over {d} generators exceeds the limit of {MAX_SIGN_GENERATORS}"
        )
    signs = (1, -1) if spec.kind == 'PSL' else (1,)
    per_element = 1 if spec.kind == 'PSL' else 2

    report = StabilizerReport(order=0, dimension=0)

    def visit(k: int, rows: np.ndarray, eps: Tuple[int, ...]):
        # solutions of the sign conditions so far; an empty space prunes the branch
        basis = kernel_basis(rows, 4, tol) if rows.shape[0] else np.eye(4, dtype=complex)
        if basis.shape[1] == 0:
            return
        if k == d:
            g = _generic_invertible(basis, 2)
            if g is None:
                return
            # a line of solutions is one projective element, anything larger is a continuum
            if basis.shape[1] > 1:
                report.order = None
                report.dimension = max(report.dimension, basis.shape[1] - 1)
                return
            # normalize into SL(2)
            g = g / np.sqrt(np.linalg.det(g))
            report.sign_vectors.append(eps)
            report.elements.append(g)
            if spec.kind == 'SL':
                report.elements.append(-g)
            if report.order is not None:
                report.order += per_element
            return
        for sign in signs:
            op = _commutation_operator(rep.images[k], sign)
            visit(k + 1, np.vstack([rows, op]), eps + (sign,))

    visit(0, np.zeros((0, 4), dtype=complex), ())
    if report.order is not None:
        report.dimension = 0
    log.debug("projective stabilizer: order %s, dimension %d", report.order, report.dimension)
    return report


def expected_dimension(spec: GroupSpec, surface: SurfaceKind) -> int:
    """Dimension of the smooth locus of the character variety of a closed surface"""
    dim_g = spec.lie_dim
    dim_z = spec.center_dim
    if surface.orientable:
        g = surface.genus_or_crosscaps
        if g <= 1:
            raise ValueError(f"The dimension formula requires genus g > 1, got {g}")
        return (2 * g - 2) * dim_g + 2 * dim_z
    h = surface.genus_or_crosscaps
    if h <= 2:
        raise ValueError(
            f"The dimension formula requires a connected sum of h > 2 projective planes, got h = {h}"
        )
    return (h - 2) * dim_g + dim_z


def _stabilizer_available(rep: Representation) -> bool:
    return (rep.spec.n == 2 and rep.spec.kind in ('SL', 'PSL')
            and rep.presentation.generator_count <= MAX_SIGN_GENERATORS)


def classify(rep: Representation, tol: Optional[Tolerances] = None,
             report: Optional[CohomologyReport] = None) -> Classification:
    tol = resolve(tol)
    report = report or cohomology_report(rep, tol)
    spec = rep.spec
    q = report.relator_count

    simple = report.semisimple_b0 == 0
    certificate = is_reductive(rep, tol)

    stabilizer_order = None
    if _stabilizer_available(rep):
        stabilizer = projective_stabilizer(rep, tol)
        stabilizer_order = stabilizer.order
        good = GOOD_YES if certificate.reductive and stabilizer.order == spec.center_order else GOOD_NO
    elif certificate.reductive and report.b0 == spec.center_dim:
        good = GOOD_DIM_ONLY
    else:
        good = GOOD_NO

    b2_semisimple = report.semisimple_b2
    if q == 0:
        verdict, reason = SMOOTH, "free group: Hom is a product of copies of the group"
    elif q == 1 and b2_semisimple == 0:
        verdict, reason = SMOOTH, "single relator with vanishing H^2 in semisimple coefficients"
    elif q == 1:
        verdict = NOT_DETERMINED
        reason = (f"H^2 with semisimple coefficients has dimension {b2_semisimple}; smoothness "
                  f"needs dim H^2 to be minimal nearby, scan a deformation family to check")
    else:
        verdict = NOT_DETERMINED
        reason = f"{q} relators: {MULTI_RELATOR_CAVEAT}"

    hom_smooth = None
    hom_expected = None
    if q <= 1:
        hom_smooth = b2_semisimple == 0
    kind = surface_kind(rep.presentation)
    if kind is not None and not kind.orientable and report.b2 == 0:
        hom_expected = (kind.genus_or_crosscaps - 1) * report.lie_dim

    local_dimension = None
    expected = None
    if good == GOOD_YES and verdict == SMOOTH:
        local_dimension = report.b1
    if kind is not None:
        try:
            expected = expected_dimension(spec, kind)
        except ValueError:
            expected = None

    result = Classification(
        simple=simple,
        reductive=certificate.reductive,
        stabilizer_dim=report.b0,
        good=good,
        smooth_verdict=verdict,
        reason=reason,
        projective_stabilizer_order=stabilizer_order,
        reductive_certificate=certificate,
        hom_smooth=hom_smooth,
        hom_tangent_dim=report.z1_dim,
        hom_tangent_expected=hom_expected,
        local_dimension=local_dimension,
        expected_dimension=expected,
    )
    log.info("classified: simple=%s reductive=%s good=%s verdict=%s",
             result.simple, result.reductive, result.good, result.smooth_verdict)
    return result


@dataclass(frozen=True)
class MatrixFactor:
    """Constant matrix, or exp(scale * pi * t * i * M)"""

    matrix: np.ndarray
    scale: Optional[float] = None

    @property
    def is_constant(self) -> bool:
        return self.scale is None

    def evaluate(self, t: float) -> np.ndarray:
        m = np.asarray(self.matrix, dtype=complex)
        if self.scale is None:
            return m
        return expm(1j * np.pi * self.scale * t * m)


@dataclass(frozen=True)
class FamilySpec:
    """Per-generator products of matrix factors sampled on a grid of t values"""

    presentation: Presentation
    spec: GroupSpec
    factors: Tuple[Tuple[MatrixFactor, ...], ...]
    samples: Tuple[float, ...]

    def __post_init__(self):
        if len(self.factors) != self.presentation.generator_count:
            raise ValueError(
                f"Family defines {len(self.factors)} generator images for "
                f"{self.presentation.generator_count} generators"
            )

    def instance(self, t: float) -> Representation:
        images = []
        for chain in self.factors:
            image = np.eye(self.spec.n, dtype=complex)
            for factor in chain:
                image = image @ factor.evaluate(t)
            images.append(image)
        return Representation(self.presentation, self.spec, tuple(images))

    def is_constant(self) -> bool:
        return all(f.is_constant for chain in self.factors for f in chain)


@dataclass
class ScanRow:
    t: float
    b0: int
    b1: int
    b2: int
    simple: bool
    reductive: bool
    classification: Classification
    warnings: List[str] = field(default_factory=list)
    cover_stabilizer_order: Optional[int] = None

    @property
    def bettis(self) -> Tuple[int, int, int]:
        return self.b0, self.b1, self.b2

    @property
    def euler(self) -> int:
        return self.b0 - self.b1 + self.b2


@dataclass
class ScanResult:
    rows: List[ScanRow]
    mode: Tuple[int, int, int]
    jumps: List[float]

    @property
    def jump_note(self) -> str:
        if not self.jumps:
            return "no Betti jumps on this grid"
        at = ', '.join(f'{t:g}' for t in self.jumps)
        return (f"Betti jump at t = {at}: b1 is not locally constant there, so the "
                f"character variety is singular at these samples")


def _scan_sample(fam: FamilySpec, t: float, tol: Tolerances, with_cover: bool) -> ScanRow:
    rep = fam.instance(t)
    try:
        report = cohomology_report(rep, tol)
    except InvalidRepresentationError as e:
        raise InvalidRepresentationError(
            f"sample t = {t:g}: {e}", relator_index=e.relator_index,
            relator=e.relator, residual=e.residual,
        ) from e
    classification = classify(rep, tol, report)
    cover_order = None
    if with_cover:
        restricted = restrict_to_subgroup(rep, orientation_cover_presentation(rep.presentation))
        # the cover has 2h - 1 generators; past the sign enumeration limit the column stays empty
        if _stabilizer_available(restricted):
            cover_order = projective_stabilizer(restricted, tol).order
    return ScanRow(
        t=t, b0=report.b0, b1=report.b1, b2=report.b2,
        simple=classification.simple, reductive=classification.reductive,
        classification=classification, warnings=list(report.warnings),
        cover_stabilizer_order=cover_order,
    )


def scan_family(fam: FamilySpec, tol: Optional[Tolerances] = None,
                workers: Optional[int] = None) -> ScanResult:
    """Cohomology and classification at every sample; rows come back in grid order"""
    tol = resolve(tol)
    with_cover = (is_canonical_nonorientable(fam.presentation) and fam.spec.n == 2
                  and fam.spec.kind in ('SL', 'PSL'))
    log.info("scanning %d samples", len(fam.samples))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda t: _scan_sample(fam, t, tol, with_cover), fam.samples))

    counts = Counter(row.bettis for row in rows)
    mode = counts.most_common(1)[0][0] if rows else (0, 0, 0)
    jumps = [row.t for row in rows if row.bettis != mode]
    for t in jumps:
        log.warning("Betti jump at t = %g", t)
    return ScanResult(rows, mode, jumps)
