"""
Numeric tolerances and tool metadata shared by every analysis
"""
from dataclasses import dataclass, replace, asdict
from typing import Dict, Any, Optional


__version__ = "1.0.0"

REPORT_SCHEMA = "charvar.analysis_report.v1"


@dataclass(frozen=True)
class Tolerances:
    """Cutoffs used by rank decisions and validation checks"""

    # singular values <= rank_rel * sigma_max count as zero
    rank_rel: float = 1e-9
    # absolute cutoff when the matrix is numerically zero
    rank_floor: float = 1e-12
    # kept/dropped singular value ratio below this raises a gap warning
    gap_warning: float = 1e6
    # distance of a relator image to the identity (or the center for PSL)
    relator: float = 1e-8
    # cocycle residual, relative to the cocycle norm
    cocycle: float = 1e-8
    # ||d2 d1|| relative to ||d2|| ||d1||
    chain: float = 1e-9
    # cup pairing against coboundaries, relative to the cocycle norms
    pairing: float = 1e-8
    # eigenvector condition number above which a matrix is treated as defective
    eig_condition: float = 1e8

    def with_rank_rel(self, value: float) -> "Tolerances":
        if not value > 0:
            raise ValueError(f"rank tolerance must be positive, got {value}")
        return replace(self, rank_rel=float(value))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def resolve(tol: Optional[Tolerances]) -> Tolerances:
    return DEFAULT_TOLERANCES if tol is None else tol
