"""
Complex matrix groups GL/SL/PSL(n), Lie algebra bases, adjoint operators and
evaluation of words and group-ring elements under a representation
"""
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import Tolerances, resolve
from errors import ConvergenceError, InvalidRepresentationError
from presentation import FreeWord, GroupRingElement, Presentation


log = logging.getLogger(__name__)

KINDS = ('GL', 'SL', 'PSL')

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class GroupSpec:
    """Matrix group kind and size"""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown group kind {self.kind!r}, expected one of {KINDS}")
        if self.n < 2:
            raise ValueError(f"Matrix size must be at least 2, got {self.n}")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Accepts 'SL(2,C)', 'GL(3, C)', 'PSL(2,C)' and the short forms 'SL(2)'"""
        match = re.fullmatch(r'(GL|SL|PSL)\((\d+)(?:,C)?\)', re.sub(r'\s+', '', text))
        if not match:
            raise ValueError(f"Unrecognized group {text!r}")
        return cls(match.group(1), int(match.group(2)))

    @property
    def label(self) -> str:
        return f'{self.kind}({self.n},C)'

    @property
    def lie_dim(self) -> int:
        return self.n * self.n if self.kind == 'GL' else self.n * self.n - 1

    @property
    def center_dim(self) -> int:
        return 1 if self.kind == 'GL' else 0

    @property
    def center_order(self) -> Optional[int]:
        """Order of the center of the matrix group; None when it is infinite"""
        if self.kind == 'GL':
            return None
        return self.n if self.kind == 'SL' else 1


def _sl_basis(n: int) -> List[np.ndarray]:
    if n == 2:
        return [SIGMA_1.copy(), SIGMA_2.copy(), SIGMA_3.copy()]
    basis = []
    for i in range(n):
        for j in range(n):
            if i != j:
                e = np.zeros((n, n), dtype=complex)
                e[i, j] = 1
                basis.append(e)
    for k in range(n - 1):
        e = np.zeros((n, n), dtype=complex)
        e[k, k] = 1
        e[k + 1, k + 1] = -1
        basis.append(e)
    return basis


def lie_basis(spec: GroupSpec) -> Tuple[np.ndarray, ...]:
    """Fixed ordered basis of the Lie algebra.

    SL(2)/PSL(2): (sigma_1, sigma_2, sigma_3).
    SL(n)/PSL(n), n > 2: off-diagonal elementary matrices E_ij in row-major
    order, then the diagonal differences E_kk - E_(k+1)(k+1).
    GL(n): the identity matrix (spanning the center) followed by the sl(n) basis.
    """
    return lie_algebra(spec).basis


class LieAlgebra:
    """Coordinates, trace form and center/semisimple splitting for one matrix group"""

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        basis = _sl_basis(spec.n)
        if spec.kind == 'GL':
            basis = [np.eye(spec.n, dtype=complex)] + basis
        for e in basis:
            e.setflags(write=False)
        self.basis: Tuple[np.ndarray, ...] = tuple(basis)
        self.dim = len(basis)
        self._stack = np.array([e.reshape(-1) for e in basis]).T
        self._solve = np.linalg.pinv(self._stack)
        self.gram = np.array([[np.trace(a @ b) for b in basis] for a in basis])
        self.center_indices = tuple(range(spec.center_dim))
        self.semisimple_indices = tuple(range(spec.center_dim, self.dim))

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        return self._solve @ np.asarray(x, dtype=complex).reshape(-1)

    def matrix(self, vector: Sequence[complex]) -> np.ndarray:
        return (self._stack @ np.asarray(vector, dtype=complex)).reshape(self.spec.n, self.spec.n)

    def trace_form(self, u: Sequence[complex], v: Sequence[complex]) -> complex:
        """B(X, Y) = tr(XY) in coordinates"""
        return complex(np.asarray(u) @ self.gram @ np.asarray(v))


@lru_cache(maxsize=None)
def lie_algebra(spec: GroupSpec) -> LieAlgebra:
    return LieAlgebra(spec)


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """Dense operator on the Lie algebra in the fixed basis"""

    matrix: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> "LinearOperator":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def zero(cls, dim: int) -> "LinearOperator":
        return cls(np.zeros((dim, dim), dtype=complex))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            return LinearOperator(self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator(self.matrix + other.matrix)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator(self.matrix - other.matrix)

    def __mul__(self, scalar) -> "LinearOperator":
        return LinearOperator(scalar * self.matrix)

    __rmul__ = __mul__

    def inverse(self) -> "LinearOperator":
        return LinearOperator(np.linalg.inv(self.matrix))

    def allclose(self, other: "LinearOperator", atol: float = 1e-10) -> bool:
        return np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)


def _check_invertible(g: np.ndarray) -> None:
    if not np.all(np.isfinite(g)):
        raise InvalidRepresentationError("Matrix has non-finite entries")
    scale = max(np.linalg.norm(g), 1.0)
    if abs(np.linalg.det(g)) <= 1e-12 * scale ** g.shape[0]:
        raise InvalidRepresentationError("Matrix is singular and has no adjoint action")


def adjoint_operator(g: np.ndarray, spec: GroupSpec) -> LinearOperator:
    """Matrix of X -> g X g^-1 in the fixed Lie algebra basis"""
    g = np.asarray(g, dtype=complex)
    if g.shape != (spec.n, spec.n):
        raise ValueError(f"Expected a {spec.n}x{spec.n} matrix, got shape {g.shape}")
    _check_invertible(g)
    algebra = lie_algebra(spec)
    g_inv = np.linalg.inv(g)
    columns = [algebra.coordinates(g @ e @ g_inv) for e in algebra.basis]
    return LinearOperator(np.array(columns).T)


@dataclass(frozen=True, eq=False)
class Representation:
    """Homomorphism from a finitely presented group, given on generators"""

    presentation: Presentation
    spec: GroupSpec
    images: Tuple[np.ndarray, ...]

    def __post_init__(self):
        images = []
        for k, image in enumerate(self.images):
            m = np.array(image, dtype=complex)
            if m.shape != (self.spec.n, self.spec.n):
                raise ValueError(
                    f"Image of {self.presentation.generator_names[k]} has shape {m.shape}, "
                    f"expected ({self.spec.n}, {self.spec.n})"
                )
            m.setflags(write=False)
            images.append(m)
        if len(images) != self.presentation.generator_count:
            raise ValueError(
                f"{len(images)} images given for {self.presentation.generator_count} generators"
            )
        object.__setattr__(self, 'images', tuple(images))

    @property
    def lie_dim(self) -> int:
        return self.spec.lie_dim

    @property
    def algebra(self) -> LieAlgebra:
        return lie_algebra(self.spec)

    @cached_property
    def inverse_images(self) -> Tuple[np.ndarray, ...]:
        for image in self.images:
            _check_invertible(image)
        return tuple(np.linalg.inv(m) for m in self.images)

    @cached_property
    def adjoint_images(self) -> Tuple[LinearOperator, ...]:
        return tuple(adjoint_operator(m, self.spec) for m in self.images)

    @cached_property
    def adjoint_inverse_images(self) -> Tuple[LinearOperator, ...]:
        return tuple(op.inverse() for op in self.adjoint_images)

    def conjugated(self, g: np.ndarray) -> "Representation":
        g_inv = np.linalg.inv(g)
        return Representation(self.presentation, self.spec,
                              tuple(g @ m @ g_inv for m in self.images))


def _power(base: np.ndarray, inverse: np.ndarray, power: int) -> np.ndarray:
    return np.linalg.matrix_power(base if power > 0 else inverse, abs(power))


def evaluate_word(rep: Representation, w: FreeWord) -> np.ndarray:
    result = np.eye(rep.spec.n, dtype=complex)
    for gen, power in w.syllables:
        result = result @ _power(rep.images[gen], rep.inverse_images[gen], power)
    return result


def adjoint_word(rep: Representation, w: FreeWord) -> LinearOperator:
    """Ad of the image of w, as the product of generator adjoints"""
    result = np.eye(rep.lie_dim, dtype=complex)
    for gen, power in w.syllables:
        result = result @ _power(rep.adjoint_images[gen].matrix,
                                 rep.adjoint_inverse_images[gen].matrix, power)
    return LinearOperator(result)


def evaluate_group_ring(rep: Representation, u: GroupRingElement) -> LinearOperator:
    """Ad composed with the representation, extended linearly to the group ring"""
    total = np.zeros((rep.lie_dim, rep.lie_dim), dtype=complex)
    for word, coeff in u.items():
        total += coeff * adjoint_word(rep, word).matrix
    return LinearOperator(total)


@dataclass
class RelatorResidual:
    index: int
    relator: str
    residual: float
    center_element: Optional[complex] = None


@dataclass
class ValidationReport:
    accepted: bool
    tolerance: float
    residuals: List[RelatorResidual] = field(default_factory=list)
    determinant_residuals: List[float] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def worst(self) -> Optional[RelatorResidual]:
        if not self.residuals:
            return None
        return max(self.residuals, key=lambda r: r.residual)


def _center_distance(m: np.ndarray, n: int) -> Tuple[float, complex]:
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    distances = [np.linalg.norm(m - z * np.eye(n)) for z in roots]
    k = int(np.argmin(distances))
    return float(distances[k]), complex(roots[k])


def validate_representation(rep: Representation, tol: Optional[Tolerances] = None) -> ValidationReport:
    """Relator residuals: distance to I (GL/SL) or to the nearest center element (PSL)"""
    tol = resolve(tol)
    n = rep.spec.n
    report = ValidationReport(accepted=True, tolerance=tol.relator)

    for k, image in enumerate(rep.images):
        name = rep.presentation.generator_names[k]
        # non-finite images never reach the residual checks
        if not np.all(np.isfinite(image)):
            report.accepted = False
            report.notes.append(f"image of {name} has non-finite entries")
            report.determinant_residuals.append(float('nan'))
            continue
        det = np.linalg.det(image)
        if abs(det) <= 1e-12:
            report.accepted = False
            report.notes.append(f"image of {name} is singular")
            report.determinant_residuals.append(float(abs(det - 1)))
            continue
        if rep.spec.kind in ('SL', 'PSL'):
            residual = float(abs(det - 1))
            report.determinant_residuals.append(residual)
            if not residual <= tol.relator:
                report.accepted = False
                report.notes.append(f"image of {name} has determinant {det:.6g}, expected 1")
        else:
            report.determinant_residuals.append(0.0)
    if not report.accepted:
        return report

    for k, rel in enumerate(rep.presentation.relators):
        image = evaluate_word(rep, rel)
        text = rep.presentation.format_word(rel)
        if rep.spec.kind == 'PSL':
            residual, zeta = _center_distance(image, n)
            entry = RelatorResidual(k, text, residual, zeta)
            if abs(zeta - 1) > 1e-12 and residual <= tol.relator:
                report.notes.append(f"relator {text} maps to the center element {zeta:.6g}*I")
        else:
            residual = float(np.linalg.norm(image - np.eye(n)))
            entry = RelatorResidual(k, text, residual)
        report.residuals.append(entry)
        if not residual <= tol.relator:
            report.accepted = False

    log.debug("validated representation: accepted=%s, %d relators",
              report.accepted, len(report.residuals))
    return report


def require_valid(rep: Representation, tol: Optional[Tolerances] = None) -> ValidationReport:
    report = validate_representation(rep, tol)
    if not report.accepted:
        worst = report.worst
        if worst is not None and not worst.residual <= report.tolerance:
            log.warning("rejected representation: relator %s residual %.3g",
                        worst.relator, worst.residual)
            raise InvalidRepresentationError(
                f"Relator {worst.index + 1} ({worst.relator}) is not satisfied: "
                f"residual {worst.residual:.6g} exceeds tolerance {report.tolerance:g}",
                relator_index=worst.index, relator=worst.relator, residual=worst.residual,
            )
        raise InvalidRepresentationError('; '.join(report.notes) or "invalid representation")
    return report


def _random_matrix(rng: np.random.Generator, spec: GroupSpec) -> np.ndarray:
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        det = np.linalg.det(m)
        if abs(det) > 1e-2:
            break
    if spec.kind == 'GL':
        return m
    return m / np.sqrt(det)


def _unit_det(m: np.ndarray) -> np.ndarray:
    return m / np.sqrt(np.linalg.det(m))


def _solve_commutator(q: np.ndarray, rng: np.random.Generator,
                      tol: Tolerances) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """SL(2) pair (a, b) with a b a^-1 b^-1 = q, or None when this draw fails"""
    # q = I: b commutes with a, so take a polynomial in a
    if np.linalg.norm(q - np.eye(2)) < 1e-9:
        a = _random_matrix(rng, GroupSpec('SL', 2))
        alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = alpha * np.eye(2) + beta * a
        if abs(np.linalg.det(b)) < 1e-3:
            return None
        return a, _unit_det(b)

    # a is diagonal in a random frame s with eigenvalues lam, 1/lam
    s = _random_matrix(rng, GroupSpec('SL', 2))
    s_inv = np.linalg.inv(s)
    qp = s_inv @ q @ s
    denom = qp[1, 1] - 1
    if abs(denom) < 1e-6:
        return None
    # b a^-1 b^-1 = a^-1 q forces tr(a^-1 q) = lam + 1/lam
    lam = np.sqrt((1 - qp[0, 0]) / denom)
    if abs(lam) < 1e-6 or abs(lam - 1 / lam) < 1e-6:
        return None
    a = s @ np.diag([lam, 1 / lam]) @ s_inv
    target = np.array([1 / lam, lam])
    # b carries the eigenframe of a^-1 to the eigenframe of c = a^-1 q
    c = np.linalg.inv(a) @ q
    values, vectors = np.linalg.eig(c)
    order = [int(np.argmin(abs(values - t))) for t in target]
    if len(set(order)) != 2 or np.max(abs(values[order] - target)) > 1e-6:
        return None
    w = vectors[:, order]
    if np.linalg.cond(w) > tol.eig_condition:
        return None
    # free diagonal rescaling of the frame
    delta = np.diag(rng.normal(size=2) + 1j * rng.normal(size=2))
    b = w @ delta @ s_inv
    if abs(np.linalg.det(b)) < 1e-9:
        return None
    return a, _unit_det(b)


def _square_root(m: np.ndarray, spec: GroupSpec, tol: Tolerances) -> Optional[np.ndarray]:
    """Square root by eigendecomposition (principal branch); None for defective input"""
    values, vectors = np.linalg.eig(m)
    if np.linalg.cond(vectors) > tol.eig_condition:
        return None
    roots = np.sqrt(values.astype(complex))
    if spec.kind != 'GL' and abs(np.prod(roots) + 1) < 1e-6:
        # det would be -1; this also covers m = -I, whose root becomes diag(i, -i)
        roots[1] = -roots[1]
    return vectors @ np.diag(roots) @ np.linalg.inv(vectors)


def random_surface_representation(spec: GroupSpec, surface, seed: int,
                                  tol: Optional[Tolerances] = None,
                                  max_retries: int = 100) -> Representation:
    """Random representation of a canonical surface group into SL(2) or GL(2).

    Orientable genus g: a_1, b_1, ..., a_(g-1), b_(g-1) are drawn at random and
    the last pair is solved so the product of commutators is I. Non-orientable
    with h crosscaps: x_1 ... x_(h-1) are drawn and x_h is a square root of
    (prod x_i^2)^-1. Deterministic for a given seed.
    """
    from surfaces import canonical_presentation

    tol = resolve(tol)
    if spec.n != 2 or spec.kind not in ('SL', 'GL'):
        raise ValueError(f"Random surface representations are only drawn into SL(2) or GL(2), not {spec.label}")
    presentation = canonical_presentation(surface)
    rng = np.random.default_rng(seed)
    sl2 = GroupSpec('SL', 2)

    for attempt in range(max_retries):
        if surface.orientable:
            g = surface.genus_or_crosscaps
            images: List[np.ndarray] = []
            product = np.eye(2, dtype=complex)
            for _ in range(g - 1):
                a = _random_matrix(rng, sl2)
                b = _random_matrix(rng, sl2)
                images += [a, b]
                product = product @ a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)
            pair = _solve_commutator(np.linalg.inv(product), rng, tol)
            if pair is None:
                continue
            images += list(pair)
            if spec.kind == 'GL':
                # commutators do not see scalars
                scales = np.exp(rng.normal(size=len(images)) + 1j * rng.normal(size=len(images)))
                images = [s * m for s, m in zip(scales, images)]
        else:
            h = surface.genus_or_crosscaps
            images = [_random_matrix(rng, spec) for _ in range(h - 1)]
            product = np.eye(2, dtype=complex)
            for m in images:
                product = product @ m @ m
            root = _square_root(np.linalg.inv(product), spec, tol)
            if root is None:
                continue
            images.append(root)

        rep = Representation(presentation, spec, tuple(images))
        if validate_representation(rep, tol).accepted:
            log.debug("random surface representation drawn after %d attempt(s)", attempt + 1)
            return rep
    raise ConvergenceError(f"No valid random representation after {max_retries} draws (seed {seed})")


@dataclass(frozen=True, eq=False)
class Cocycle:
    """One Lie algebra vector per generator; values[i] is gamma(x_i) in basis coordinates"""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 2:
            raise ValueError(f"Cocycle values must be a (generators x lie_dim) array, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_vector(cls, vector: Sequence[complex], lie_dim: int) -> "Cocycle":
        return cls(np.asarray(vector, dtype=complex).reshape(-1, lie_dim))

    @classmethod
    def coboundary(cls, rep: Representation, xi: Sequence[complex]) -> "Cocycle":
        """gamma(u) = xi - Ad_u xi"""
        xi = np.asarray(xi, dtype=complex)
        return cls(np.array([xi - op @ xi for op in rep.adjoint_images]))

    @property
    def vector(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __add__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.values + other.values)

    def __mul__(self, scalar) -> "Cocycle":
        return Cocycle(scalar * self.values)

    __rmul__ = __mul__


def cocycle_value(rep: Representation, gamma: Cocycle, w: FreeWord) -> np.ndarray:
    """Extend gamma to a word by gamma(uv) = gamma(u) + Ad_u gamma(v)"""
    value = np.zeros(rep.lie_dim, dtype=complex)
    ad = np.eye(rep.lie_dim, dtype=complex)
    for gen, step in w.letters():
        if step > 0:
            value = value + ad @ gamma.values[gen]
            ad = ad @ rep.adjoint_images[gen].matrix
        else:
            ad = ad @ rep.adjoint_inverse_images[gen].matrix
            value = value - ad @ gamma.values[gen]
    return value
