import logging

import numpy as np

from app.core.graph import Graph
from app.exceptions import VerificationFailure
from app.schemas.outcome_schemas import VerificationReport
from app.schemas.partition_schemas import Partition
from app.schemas.profile_schemas import ProfileConstants
from app.services.partition_services import j_bounds
from app.services.weighting_services import conflicts, sums_of

logger = logging.getLogger(__name__)


def final_verify(graph: Graph, part: Partition, weights: np.ndarray,
                 w_sums: np.ndarray, profile: ProfileConstants
                 ) -> VerificationReport:
    """
    Checks the finished weighting: no conflicts, weights in [1, 3], U sums
    in the reserved residues, W sums outside them and unchanged since the
    w-stage, U sums within [d, 2d] and J(u).
    """
    sums = sums_of(graph, weights)
    modulus = profile.modulus_M
    reserved = np.isin(sums % modulus,
                       [r % modulus for r in profile.reserved_residues])
    u_mask, w_mask = part.u_mask, part.w_mask
    degree = part.degree
    lo, hi = j_bounds(part, profile)

    report = VerificationReport(
        conflicts=conflicts(graph, weights),
        weight_range=np.flatnonzero((weights < 1) | (weights > 3)).tolist(),
        u_residue=np.flatnonzero(u_mask & ~reserved).tolist(),
        w_residue=np.flatnonzero(w_mask & reserved).tolist(),
        w_sum_changed=np.flatnonzero(w_mask & (sums != w_sums)).tolist(),
        u_degree_range=np.flatnonzero(
            u_mask & ((sums < degree) | (sums > 2 * degree))).tolist(),
        u_outside_j=np.flatnonzero(
            u_mask & ((sums < lo) | (sums > hi))).tolist(),
        strict_bounds=profile.strict_bounds
    )
    for name, ids in report.warnings.items():
        logger.warning(f'final check {name}: {len(ids)} vertices')
    return report


def require_verified(report: VerificationReport) -> None:
    if not report.ok:
        raise VerificationFailure(
            'final weighting rejected',
            context={name: ids[:20] for name, ids in report.errors.items()}
        )
