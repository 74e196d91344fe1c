# Copyright 2026 The haflab Authors
# SPDX-License-Identifier: Apache-2.0

"""Hafnians, Gaussian-field Cox processes and truncated Fock-space checks."""

from ._haflab import (
    CapacityError,
    ConfigError,
    DimensionError,
    Error,
    GaussianFieldModel,
    ModelError,
    PreconditionError,
    RangeError,
    alpha_det,
    block_kernel,
    builtin_model_names,
    determinant,
    field_moment_mc,
    fock_moment,
    fock_theta,
    growth_bound,
    hafnian,
    intensity_integral,
    pairing_count,
    permanent,
    quadrature_haf_moment,
    sample_cox,
    sample_field,
)

__version__ = "0.1.0"
