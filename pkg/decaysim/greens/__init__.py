"""Диадические тензоры Грина для канонических геометрий и проверки их свойств."""

from decaysim.greens.checks import (
    check_conjugation,
    check_reciprocity,
    im_green_at_atom,
    psd_defect,
)
from decaysim.greens.free import curl_curl_residual, free_dyadic, green_bulk, green_free
from decaysim.greens.geometry import (
    FreeSpace,
    Geometry,
    GreenSample,
    HalfSpace,
    HomogeneousBulk,
    Slab,
    SphereCavityCenter,
    Toy1D,
    wavenumber,
)
from decaysim.greens.halfspace import (
    fresnel_coefficients,
    green_scatter_halfspace_diag,
    halfspace_scatter_diag,
)
from decaysim.greens.sphere import (
    sphere_center_reflection,
    sphere_flux_balance,
    sphere_wall_reflectance,
)
from decaysim.greens.toy1d import (
    IdentityCheck,
    check_identity_1d,
    toy1d_green,
    toy1d_green_by_source_jump,
)

__all__ = [
    "FreeSpace",
    "Geometry",
    "GreenSample",
    "HalfSpace",
    "HomogeneousBulk",
    "IdentityCheck",
    "Slab",
    "SphereCavityCenter",
    "Toy1D",
    "check_conjugation",
    "check_identity_1d",
    "check_reciprocity",
    "curl_curl_residual",
    "free_dyadic",
    "fresnel_coefficients",
    "green_bulk",
    "green_free",
    "green_scatter_halfspace_diag",
    "halfspace_scatter_diag",
    "im_green_at_atom",
    "psd_defect",
    "sphere_center_reflection",
    "sphere_flux_balance",
    "sphere_wall_reflectance",
    "toy1d_green",
    "toy1d_green_by_source_jump",
    "wavenumber",
]
