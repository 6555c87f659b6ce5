"""Cache-aided delivery over relay networks with overlapping coverage.

Exact-combinatorics implementations of three placement/delivery schemes for
a network where H edge nodes, fed by a cloud over finite fronthaul links,
serve C(H, r) receivers (one per r-subset of edge nodes):

- erasure-coded placement with aligned-interference delivery (``mdsia``),
- cloud-assisted zero-forcing with subset placement (``soft_transfer``),
- cloud-free zero-forcing for large combined caches (``zf``),

plus exact-rational delivery-time algebra (``ndt``), channel/beamforming
numerics (``channel``), fixture rendering (``fixtures``), and a CLI
(``cachenet``).
"""

from .channel import (
    ChannelMatrix,
    beamformers_for,
    draw_channel,
    make_beamformer,
    null_space,
)
from .errors import (
    CachenetError,
    DegenerateChannel,
    DemandLengthMismatch,
    DuplicateChunk,
    EmptyNullSpace,
    FieldOverflow,
    IndivisibleFileSize,
    InterferenceLeak,
    InvalidConnectivity,
    LengthError,
    NonDistinctDemand,
    NonIntegralCacheParameter,
    OutOfRange,
    PeelFailure,
    ReconstructionMismatch,
    RegionViolation,
    SingularSystem,
    UnsupportedRegime,
)
from .mdscode import CodedChunk, Library, mds_decode, mds_encode, random_library
from .mdsia import (
    AlignmentPlan,
    AlignmentReport,
    InterferenceMatrix,
    MulticastMessage,
    PieceLabel,
    PlacementState,
    build_interference_matrices,
    certify_alignment,
    mdsia_decode_check,
    mdsia_fronthaul,
    mdsia_local_multicast,
    mdsia_ndt,
    mdsia_place,
    mdsia_structural_ndt,
    minimal_file_bits,
    plan_alignment,
)
from .ndt import (
    ComparisonRow,
    ConvexityReport,
    NdtValue,
    SharingDecomposition,
    as_fraction,
    compare_schemes,
    convexity_check,
    memory_share,
    rho_threshold,
    rho_threshold_remark_form,
    shared_mdsia_ndt,
    shared_scheme_ndt,
    shared_soft_ndt,
    shared_zf_ndt,
)
from .soft_transfer import (
    DeliveryStep,
    SoftPlacement,
    SoftSubfileLabel,
    chunked_step_count,
    chunked_step_geometry,
    minimal_soft_file_bits,
    soft_fronthaul_bits_per_en,
    soft_missing,
    soft_ndt,
    soft_place,
    soft_schedule,
    soft_simulate,
    soft_structural_ndt,
)
from .topology import NetworkTopology, build_topology, index
from .verdict import RecoveryVerdict
from .zf import (
    ZfParams,
    ZfPlacement,
    minimal_zf_file_bits,
    zf_deliver,
    zf_ndt,
    zf_place,
    zf_structural_ndt,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "1.0.0"
