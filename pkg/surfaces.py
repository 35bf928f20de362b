"""
Surface groups: canonical presentations, the closed forms for H^0 and H^2 of
non-orientable surfaces, the orientation double cover and the cup product
pairing on H^1.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import Tolerances, resolve
from errors import CocycleError, ParityError, PresentationShapeError
from presentation import FreeWord, Presentation, SubgroupPresentation, index2_subgroup
from rep import (
    Cocycle, Representation, adjoint_word, cocycle_value, evaluate_word,
    require_valid,
)
from cohomology import (
    EXACT_DUALITY, cohomology_report, h1_cocycles, intersect_kernels, numeric_rank,
)


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SurfaceKind:
    """Closed surface: orientable of genus g >= 1, or non-orientable with h >= 2 crosscaps"""

    orientable: bool
    genus_or_crosscaps: int

    def __post_init__(self):
        low = 1 if self.orientable else 2
        if self.genus_or_crosscaps < low:
            what = 'genus' if self.orientable else 'number of crosscaps'
            raise ValueError(f"{what} must be at least {low}, got {self.genus_or_crosscaps}")

    @classmethod
    def orientable_genus(cls, g: int) -> "SurfaceKind":
        return cls(True, g)

    @classmethod
    def crosscaps(cls, h: int) -> "SurfaceKind":
        return cls(False, h)

    @property
    def euler_characteristic(self) -> int:
        if self.orientable:
            return 2 - 2 * self.genus_or_crosscaps
        return 2 - self.genus_or_crosscaps

    @property
    def generator_count(self) -> int:
        return 2 * self.genus_or_crosscaps if self.orientable else self.genus_or_crosscaps

    def describe(self) -> str:
        if self.orientable:
            return f"orientable surface of genus {self.genus_or_crosscaps}"
        return f"non-orientable surface with {self.genus_or_crosscaps} crosscaps"


def canonical_presentation(kind: SurfaceKind, names: Optional[Sequence[str]] = None) -> Presentation:
    """<a1, b1, ..., ag, bg | prod [ai, bi]> or <x1, ..., xh | prod xi^2>"""
    count = kind.generator_count
    if names is None:
        if kind.orientable:
            names = [f'{c}{i + 1}' for i in range(kind.genus_or_crosscaps) for c in 'ab']
        else:
            names = [f'x{i + 1}' for i in range(count)]
    if len(names) != count:
        raise PresentationShapeError(f"{kind.describe()} needs {count} generator names, got {len(names)}")

    if kind.orientable:
        syllables = []
        for i in range(kind.genus_or_crosscaps):
            a, b = 2 * i, 2 * i + 1
            syllables += [(a, 1), (b, 1), (a, -1), (b, -1)]
    else:
        syllables = [(i, 2) for i in range(count)]
    return Presentation(tuple(names), (FreeWord(tuple(syllables)),))


def is_canonical_nonorientable(p: Presentation) -> bool:
    h = p.generator_count
    if h < 2 or p.relator_count != 1:
        return False
    return p.relators[0].syllables == tuple((i, 2) for i in range(h))


def is_canonical_orientable(p: Presentation) -> bool:
    d = p.generator_count
    if d < 2 or d % 2 or p.relator_count != 1:
        return False
    return p.relators[0] == canonical_presentation(SurfaceKind(True, d // 2)).relators[0]


def surface_kind(p: Presentation) -> Optional[SurfaceKind]:
    """SurfaceKind of a canonical surface presentation, None for anything else"""
    if is_canonical_nonorientable(p):
        return SurfaceKind(False, p.generator_count)
    if is_canonical_orientable(p):
        return SurfaceKind(True, p.generator_count // 2)
    return None


def _require_nonorientable(rep: Representation) -> int:
    if not is_canonical_nonorientable(rep.presentation):
        raise PresentationShapeError(
            "Expected the canonical non-orientable presentation <x1..xh | x1^2 ... xh^2>, got\n"
            + rep.presentation.format()
        )
    return rep.presentation.generator_count


@dataclass
class ClosedForm:
    h0_basis: np.ndarray
    h2_basis: np.ndarray

    @property
    def h0(self) -> int:
        return self.h0_basis.shape[1]

    @property
    def h2(self) -> int:
        return self.h2_basis.shape[1]


def h0_h2_closed_form(rep: Representation, tol: Optional[Tolerances] = None) -> ClosedForm:
    """H^0 = common kernel of Ad(x_i) - I, H^2 = common kernel of Ad(x_i) + I"""
    tol = resolve(tol)
    _require_nonorientable(rep)
    m = rep.lie_dim
    identity = np.eye(m, dtype=complex)
    minus = [op.matrix - identity for op in rep.adjoint_images]
    plus = [op.matrix + identity for op in rep.adjoint_images]
    return ClosedForm(intersect_kernels(minus, m, tol), intersect_kernels(plus, m, tol))


def orientation_parity(p: Presentation) -> Tuple[int, ...]:
    return (1,) * p.generator_count


def orientation_cover_presentation(p: Presentation) -> SubgroupPresentation:
    return index2_subgroup(p, orientation_parity(p))


@dataclass
class CoverReport:
    h0_cover: int
    h2_cover: int
    h1_cover: int
    h0_base: int
    h2_base: int
    b1_base: int
    cover_genus: int
    decomposition_ok: bool
    h2_status: str = EXACT_DUALITY

    @property
    def half_dimension_ok(self) -> bool:
        return 2 * self.b1_base == self.h1_cover

    def to_dict(self):
        return {
            'h0_cover': self.h0_cover,
            'h1_cover': self.h1_cover,
            'h2_cover': self.h2_cover,
            'h2_status': self.h2_status,
            'h0_base': self.h0_base,
            'h2_base': self.h2_base,
            'b1_base': self.b1_base,
            'cover_genus': self.cover_genus,
            'decomposition_ok': self.decomposition_ok,
            'half_dimension_ok': self.half_dimension_ok,
        }


def orientation_double_cover(rep: Representation, tol: Optional[Tolerances] = None) -> CoverReport:
    """Cohomology dimensions of the orientable double cover of a non-orientable surface group.

    H^0 of the cover is cut out by the images of all products x_i x_j, H^2 follows
    from duality on the orientable cover, and H^1 from its Euler characteristic.
    """
    tol = resolve(tol)
    h = _require_nonorientable(rep)
    require_valid(rep, tol)
    m = rep.lie_dim
    identity = np.eye(m, dtype=complex)

    pairs = []
    for i in range(h):
        for j in range(h):
            word = FreeWord(((i, 1), (j, 1)))
            pairs.append(adjoint_word(rep, word).matrix - identity)
    h0_cover = intersect_kernels(pairs, m, tol).shape[1]

    base = h0_h2_closed_form(rep, tol)
    b1_base = cohomology_report(rep, tol).b1
    cover_genus = h - 1
    h1_cover = 2 * h0_cover + (2 * cover_genus - 2) * m
    report = CoverReport(
        h0_cover=h0_cover,
        h2_cover=h0_cover,
        h1_cover=h1_cover,
        h0_base=base.h0,
        h2_base=base.h2,
        b1_base=b1_base,
        cover_genus=cover_genus,
        decomposition_ok=(h0_cover == base.h0 + base.h2),
    )
    log.info("double cover: h0=%d h1=%d h2=%d, decomposition %d = %d + %d",
             report.h0_cover, report.h1_cover, report.h2_cover,
             report.h0_cover, report.h0_base, report.h2_base)
    return report


def restrict_representation(rep: Representation, subgroup: Presentation,
                            embedding: Sequence[FreeWord]) -> Representation:
    """Pull rep back along subgroup generator j -> embedding[j]"""
    if len(embedding) != subgroup.generator_count:
        raise PresentationShapeError(
            f"{len(embedding)} embedding words for {subgroup.generator_count} subgroup generators"
        )
    images = tuple(evaluate_word(rep, w) for w in embedding)
    return Representation(subgroup, rep.spec, images)


def restrict_to_subgroup(rep: Representation, sub: SubgroupPresentation) -> Representation:
    """Restriction to a Reidemeister-Schreier subgroup presentation"""
    return restrict_representation(rep, sub.as_presentation(), sub.schreier_generators)


def restrict_cocycle(rep: Representation, gamma: Cocycle, embedding: Sequence[FreeWord],
                     parity: Optional[Sequence[int]] = None) -> Cocycle:
    if parity is not None:
        for k, w in enumerate(embedding):
            if w.parity(parity):
                raise ParityError(
                    f"Embedding word {k + 1} ({rep.presentation.format_word(w)}) is odd "
                    f"and does not lie in the index-2 subgroup"
                )
    values = np.array([cocycle_value(rep, gamma, w) for w in embedding], dtype=complex)
    return Cocycle(values.reshape(len(embedding), rep.lie_dim))


def cocycle_defect(rep: Representation, gamma: Cocycle) -> float:
    """Largest ||gamma(r)|| over relators, relative to ||gamma||"""
    norm = float(np.linalg.norm(gamma.values))
    if norm == 0:
        return 0.0
    worst = max((np.linalg.norm(cocycle_value(rep, gamma, r)) for r in rep.presentation.relators),
                default=0.0)
    return float(worst) / norm


def _require_orientable_relator(p: Presentation) -> FreeWord:
    if p.relator_count != 1:
        raise PresentationShapeError(
            f"The cup product pairing needs a one-relator presentation, got {p.relator_count} relators"
        )
    relator = p.relators[0]
    for i in range(p.generator_count):
        if relator.exponent_sum(i) != 0:
            raise PresentationShapeError(
                f"Relator {p.format_word(relator)} has nonzero exponent sum in {p.generator_names[i]}; "
                f"it does not define an orientable surface class"
            )
    return relator


def _check_cocycle(rep: Representation, gamma: Cocycle, label: str, tol: Tolerances):
    if gamma.values.shape != (rep.presentation.generator_count, rep.lie_dim):
        raise CocycleError(
            f"Cocycle {label} has shape {gamma.values.shape}, expected "
            f"({rep.presentation.generator_count}, {rep.lie_dim})"
        )
    defect = cocycle_defect(rep, gamma)
    if defect > tol.cocycle:
        raise CocycleError(f"{label} is not a cocycle: relative relator residual {defect:.3g}")


def cup_pairing(rep: Representation, alpha: Cocycle, beta: Cocycle,
                tol: Optional[Tolerances] = None) -> complex:
    """Cup product of two 1-cocycles evaluated on the fundamental 2-cycle of the relator.

    For relator letters y_1 ... y_L with prefixes w_k the cycle is
    sum_k [w_(k-1) | y_k] minus [x^-1 | x] for every inverse letter x^-1,
    and (alpha u beta)(u, v) = B(alpha(u), Ad_u beta(v)) with B the trace form.
    The scale of the result is unnormalized.
    """
    tol = resolve(tol)
    relator = _require_orientable_relator(rep.presentation)
    _check_cocycle(rep, alpha, 'alpha', tol)
    _check_cocycle(rep, beta, 'beta', tol)
    residual = coboundary_pairing_residual(rep, alpha, beta)
    if not residual <= tol.pairing:
        raise CocycleError(
            f"The 2-cycle of {rep.presentation.format_word(relator)} does not kill coboundaries: "
            f"relative residual {residual:.3g}"
        )
    return complex(sum(_cycle_terms(rep, relator, alpha, beta)))


def _cycle_terms(rep: Representation, relator: FreeWord, alpha: Cocycle, beta: Cocycle) -> List[complex]:
    """Summands of the pairing, one per bar [w_(k-1) | y_k] and per inverse letter correction"""
    algebra = rep.algebra
    terms = []
    prefix = FreeWord.identity()
    for gen, step in relator.letters():
        letter = FreeWord.generator(gen, step)
        if not prefix.is_identity():
            terms.append(algebra.trace_form(
                cocycle_value(rep, alpha, prefix),
                adjoint_word(rep, prefix) @ cocycle_value(rep, beta, letter),
            ))
        if step < 0:
            terms.append(-algebra.trace_form(
                cocycle_value(rep, alpha, letter),
                rep.adjoint_inverse_images[gen] @ beta.values[gen],
            ))
        prefix = prefix * letter
    return terms


def pairing_magnitude(rep: Representation, alpha: Cocycle, beta: Cocycle) -> float:
    """Sum of the absolute values of the summands; rounding in the pairing is relative to it"""
    relator = _require_orientable_relator(rep.presentation)
    return float(sum(abs(term) for term in _cycle_terms(rep, relator, alpha, beta)))


def coboundary_pairing_residual(rep: Representation, alpha: Cocycle, beta: Cocycle) -> float:
    """Largest pairing of alpha or beta against the coboundary of a basis vector.

    Each pairing is divided by the magnitude of its summands, so the residual is
    zero up to rounding when the relator 2-cycle is closed and of order one otherwise.
    """
    relator = _require_orientable_relator(rep.presentation)
    worst = 0.0
    for k in range(rep.lie_dim):
        xi = np.zeros(rep.lie_dim, dtype=complex)
        xi[k] = 1.0
        exact = Cocycle.coboundary(rep, xi)
        # coboundary in either slot
        for terms in (_cycle_terms(rep, relator, exact, beta), _cycle_terms(rep, relator, alpha, exact)):
            magnitude = sum(abs(term) for term in terms)
            if magnitude > 0:
                worst = max(worst, abs(sum(terms)) / magnitude)
    return float(worst)


def pairing_gram(rep: Representation, basis: Sequence[Cocycle],
                 tol: Optional[Tolerances] = None) -> np.ndarray:
    k = len(basis)
    gram = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(i + 1, k):
            gram[i, j] = cup_pairing(rep, basis[i], basis[j], tol)
            gram[j, i] = cup_pairing(rep, basis[j], basis[i], tol)
    return gram


@dataclass
class PairingReport:
    h1_dim: int
    gram: np.ndarray
    gram_rank: int
    antisymmetry_residual: float

    @property
    def nondegenerate(self) -> bool:
        return self.gram_rank == self.h1_dim


def h1_pairing(rep: Representation, tol: Optional[Tolerances] = None) -> PairingReport:
    """Gram matrix of the cup pairing on a basis of H^1 and its numeric rank"""
    tol = resolve(tol)
    report = cohomology_report(rep, tol)
    basis = h1_cocycles(report)
    gram = pairing_gram(rep, basis, tol)
    scale = max(float(np.abs(gram).max()) if gram.size else 0.0, 1e-300)
    antisymmetry = float(np.abs(gram + gram.T).max()) / scale if gram.size else 0.0
    rank = numeric_rank(gram, tol).rank
    log.info("cup pairing on H^1: dim %d, Gram rank %d", len(basis), rank)
    return PairingReport(len(basis), gram, rank, antisymmetry)


@dataclass
class LagrangianReport:
    b1_base: int
    h1_cover: int
    half_dimension_ok: bool
    isotropy_checked: bool = False
    isotropy_residual: Optional[float] = None
    isotropic: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self):
        return {
            'b1_base': self.b1_base,
            'h1_cover': self.h1_cover,
            'half_dimension_ok': self.half_dimension_ok,
            'isotropy_checked': self.isotropy_checked,
            'isotropy_residual': self.isotropy_residual,
            'isotropic': self.isotropic,
            'notes': list(self.notes),
        }


def lagrangian_check(rep: Representation, cover: Optional[Presentation] = None,
                     embedding: Optional[Sequence[FreeWord]] = None,
                     tol: Optional[Tolerances] = None) -> LagrangianReport:
    """Restriction of H^1 to the orientation cover: half-dimensional, and isotropic when
    an orientable cover presentation with embedding words is supplied"""
    tol = resolve(tol)
    cover_report = orientation_double_cover(rep, tol)
    result = LagrangianReport(
        b1_base=cover_report.b1_base,
        h1_cover=cover_report.h1_cover,
        half_dimension_ok=cover_report.half_dimension_ok,
    )
    if cover is None or embedding is None:
        result.notes.append("isotropy not checked: no cover presentation with embedding words")
        return result

    parity = orientation_parity(rep.presentation)
    for k, w in enumerate(embedding):
        if w.parity(parity):
            raise ParityError(
                f"Embedding word for {cover.generator_names[k]} ({rep.presentation.format_word(w)}) "
                f"is odd and does not lie in the orientation cover"
            )
    restricted = restrict_representation(rep, cover, embedding)
    require_valid(restricted, tol)

    base = h1_cocycles(cohomology_report(rep, tol))
    pulled = [restrict_cocycle(rep, gamma, embedding, parity) for gamma in base]
    worst = 0.0
    scale = 0.0
    for i, a in enumerate(pulled):
        for b in pulled[i + 1:]:
            worst = max(worst, abs(cup_pairing(restricted, a, b, tol)))
            scale = max(scale, float(np.linalg.norm(a.values) * np.linalg.norm(b.values)))
    gram_norm = float(np.linalg.norm(rep.algebra.gram))
    residual = worst / (scale * gram_norm) if scale > 0 else 0.0
    result.isotropy_checked = True
    result.isotropy_residual = residual
    result.isotropic = residual <= tol.cocycle
    log.info("isotropy of restricted H^1: residual %.3g over %d classes", residual, len(pulled))
    return result
