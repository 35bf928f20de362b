"""
Report assembly and rendering: canonical JSON, plain text and CSV
"""
import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from config import REPORT_SCHEMA, Tolerances, __version__, resolve
from rep import Representation, validate_representation
from cohomology import CohomologyReport, cohomology_report, rank_theorem_report
from smoothness import Classification, ScanResult, classify
from surfaces import CoverReport, LagrangianReport, PairingReport


def complex_pair(z: complex) -> List[float]:
    return [float(np.real(z)), float(np.imag(z))]


def basis_columns(basis: np.ndarray) -> List[List[List[float]]]:
    return [[complex_pair(z) for z in basis[:, k]] for k in range(basis.shape[1])]


def matrix_digest(rep: Representation) -> str:
    """sha256 over the little-endian complex128 bytes of the generator images"""
    digest = hashlib.sha256()
    for image in rep.images:
        digest.update(np.ascontiguousarray(image, dtype='<c16').tobytes())
    return digest.hexdigest()


def canonical_json(data: Any) -> str:
    """Sorted keys, shortest round-trip floats; identical input gives identical bytes"""
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + '\n'


@dataclass
class AnalysisReport:
    representation: Representation
    cohomology: CohomologyReport
    classification: Classification
    tolerance: Tolerances
    validation_notes: List[str] = field(default_factory=list)
    max_relator_residual: float = 0.0
    rank_theorem: Dict[str, Any] = field(default_factory=dict)

    @property
    def warnings(self) -> List[str]:
        return list(self.cohomology.warnings) + list(self.validation_notes)

    def to_dict(self) -> Dict[str, Any]:
        rep = self.representation
        coh = self.cohomology
        semisimple = None
        if coh.semisimple is not None:
            semisimple = {'b0': coh.semisimple.b0, 'b1': coh.semisimple.b1, 'b2': coh.semisimple.b2}
        return {
            'schema': REPORT_SCHEMA,
            'tool': {'name': 'charvar', 'version': __version__},
            'tolerance': self.tolerance.to_dict(),
            'input': {
                'group': rep.spec.label,
                'generators': list(rep.presentation.generator_names),
                'relators': [rep.presentation.format_word(r) for r in rep.presentation.relators],
                'matrix_digest': matrix_digest(rep),
                'max_relator_residual': self.max_relator_residual,
            },
            'cohomology': {
                'b0': coh.b0,
                'b1': coh.b1,
                'b2': coh.b2,
                'b2_status': coh.b2_status,
                'euler': coh.euler,
                'lie_dim': coh.lie_dim,
                'rank_d1': coh.rank_d1,
                'rank_d2': coh.rank_d2,
                'z1_dim': coh.z1_dim,
                'b1_coboundaries_dim': coh.b1_dim_coboundaries,
                'chain_residual': coh.chain_residual,
                'semisimple': semisimple,
                'singular_gaps': {k: v.to_dict() for k, v in coh.singular_gaps.items()},
                'h0_basis': basis_columns(coh.h0_basis),
                'h2_basis': basis_columns(coh.h2_basis),
                'z1_basis': basis_columns(coh.z1_basis),
            },
            'classification': self.classification.to_dict(),
            'rank_theorem': self.rank_theorem,
            'warnings': self.warnings,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def to_text(self) -> str:
        rep = self.representation
        coh = self.cohomology
        cls = self.classification
        lines = [
            f"group        {rep.spec.label}",
            f"presentation {', '.join(rep.presentation.generator_names)} | "
            + ('; '.join(rep.presentation.format_word(r) for r in rep.presentation.relators) or '-'),
            f"b0 = {coh.b0}   b1 = {coh.b1}   b2 = {coh.b2}   ({coh.b2_status})",
            f"euler        {coh.euler}",
            f"rank d1 = {coh.rank_d1}   rank d2 = {coh.rank_d2}   dim Z1 = {coh.z1_dim}",
        ]
        if coh.semisimple is not None:
            s = coh.semisimple
            lines.append(f"semisimple   b0' = {s.b0}   b1' = {s.b1}   b2' = {s.b2}")
        lines += [
            f"simple       {cls.simple}",
            f"reductive    {cls.reductive}",
            f"irreducible  {cls.irreducible}",
            f"stabilizer   dim {cls.stabilizer_dim}"
            + (f", order {cls.projective_stabilizer_order}" if cls.projective_stabilizer_order is not None else ''),
            f"good         {cls.good}",
            f"verdict      {cls.smooth_verdict}: {cls.reason}",
        ]
        if cls.local_dimension is not None:
            lines.append(f"local dim    {cls.local_dimension}"
                         + (f" (expected {cls.expected_dimension})" if cls.expected_dimension is not None else ''))
        for w in self.warnings:
            lines.append(f"warning: {w}")
        lines.append(f"tolerance    {self.tolerance.rank_rel:g} relative")
        return '\n'.join(lines) + '\n'


def build_analysis_report(rep: Representation, tol: Optional[Tolerances] = None) -> AnalysisReport:
    tol = resolve(tol)
    validation = validate_representation(rep, tol)
    coh = cohomology_report(rep, tol)
    cls = classify(rep, tol, coh)
    note = rank_theorem_report(rep, tol)
    worst = validation.worst
    return AnalysisReport(
        representation=rep,
        cohomology=coh,
        classification=cls,
        tolerance=tol,
        validation_notes=list(validation.notes),
        max_relator_residual=worst.residual if worst is not None else 0.0,
        rank_theorem={
            'rank_d2': note.rank_d2,
            'relator_count': note.relator_count,
            'implied_hom_dim': note.implied_hom_dim,
            'hom_dim_bound': note.hom_dim_bound,
            'matches_single_relator_claim': note.matches_single_relator_claim,
            'annotations': list(note.annotations),
        },
    )


SCAN_COLUMNS = ('t', 'b0', 'b1', 'b2', 'simple', 'reductive', 'warnings')


def scan_to_csv(result: ScanResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    with_cover = any(row.cover_stabilizer_order is not None for row in result.rows)
    header = list(SCAN_COLUMNS) + (['cover_stabilizer_order'] if with_cover else [])
    writer.writerow(header)
    for row in result.rows:
        record = [repr(row.t), row.b0, row.b1, row.b2,
                  str(row.simple).lower(), str(row.reductive).lower(), ' | '.join(row.warnings)]
        if with_cover:
            record.append('' if row.cover_stabilizer_order is None else row.cover_stabilizer_order)
        writer.writerow(record)
    return buffer.getvalue()


def scan_to_text(result: ScanResult) -> str:
    lines = [f"{'t':>10} {'b0':>3} {'b1':>3} {'b2':>3} {'simple':>7} {'reductive':>9}  flags"]
    for row in result.rows:
        flags = []
        if row.t in result.jumps:
            flags.append('jump')
        if row.cover_stabilizer_order is not None:
            flags.append(f'cover stabilizer {row.cover_stabilizer_order}')
        if row.warnings:
            flags.append(f'{len(row.warnings)} warning(s)')
        lines.append(f"{row.t:>10g} {row.b0:>3} {row.b1:>3} {row.b2:>3} "
                     f"{str(row.simple):>7} {str(row.reductive):>9}  {', '.join(flags)}")
    lines.append(result.jump_note)
    return '\n'.join(lines) + '\n'


def scan_to_dict(result: ScanResult) -> Dict[str, Any]:
    return {
        'rows': [
            {
                't': row.t, 'b0': row.b0, 'b1': row.b1, 'b2': row.b2, 'euler': row.euler,
                'simple': row.simple, 'reductive': row.reductive,
                'smooth_verdict': row.classification.smooth_verdict,
                'cover_stabilizer_order': row.cover_stabilizer_order,
                'warnings': list(row.warnings),
            }
            for row in result.rows
        ],
        'mode': list(result.mode),
        'jumps': list(result.jumps),
        'note': result.jump_note,
    }


def cover_to_text(cover: CoverReport, lagrangian: Optional[LagrangianReport] = None) -> str:
    ok = 'ok' if cover.decomposition_ok else 'FAILED'
    lines = [
        f"cover genus  {cover.cover_genus}",
        f"h0_cover = {cover.h0_cover}   h1_cover = {cover.h1_cover}   h2_cover = {cover.h2_cover} ({cover.h2_status})",
        f"decomposition {cover.h0_cover} = {cover.h0_base} + {cover.h2_base}  {ok}",
        f"half dimension {cover.b1_base} = {cover.h1_cover} / 2  {'ok' if cover.half_dimension_ok else 'FAILED'}",
    ]
    if lagrangian is not None and lagrangian.isotropy_checked:
        lines.append(f"isotropy residual {lagrangian.isotropy_residual:.3g}  "
                     f"{'ok' if lagrangian.isotropic else 'FAILED'}")
    elif lagrangian is not None:
        lines += [f"note: {n}" for n in lagrangian.notes]
    return '\n'.join(lines) + '\n'


def pairing_to_dict(pairing: PairingReport) -> Dict[str, Any]:
    return {
        'h1_dim': pairing.h1_dim,
        'gram_rank': pairing.gram_rank,
        'nondegenerate': pairing.nondegenerate,
        'antisymmetry_residual': pairing.antisymmetry_residual,
        'gram': [[complex_pair(z) for z in row] for row in pairing.gram],
        'normalization': 'unnormalized',
    }
