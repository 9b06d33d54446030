"""Rician channel realization.

All links fade as sqrt(1/beta) / sqrt(K+1) * (sqrt(K)*h_los + h_nlos) with
h_los, h_nlos i.i.d. CN(0,1) and beta the power path loss of the link. The
solvers consume only magnitudes: two direct-link scalars, four per-element
cascade scalars (arithmetic mean over elements of the per-element product
magnitude), and the squared norms of the panel-link vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ChannelParams


@dataclass(frozen=True)
class ChannelRealization:
    """Magnitude summary of one quasi-static frame.

    h_bs / h_sd are the direct BS-S and S-D link magnitudes. h1 (BS-panel-S)
    and h2 (S-panel-D) are per-element cascade scalars for the element
    scenario; h3 / h4 are the module-scenario counterparts (same physical
    links and frame, hence equal values). norm_* are squared vector norms of
    the panel links; the S-panel link is reciprocal so norm_hsr_sq equals
    norm_hrs_sq.
    """

    n_elements: int
    h_bs: float
    h_sd: float
    h1: float
    h2: float
    h3: float
    h4: float
    norm_hbr_sq: float
    norm_hsr_sq: float
    norm_hrs_sq: float
    norm_hrd_sq: float


def _cn(rng: np.random.Generator, size: int | None = None) -> np.ndarray | complex:
    """Standard complex normal: unit mean-square magnitude."""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) / np.sqrt(2.0)


def _rician(rng: np.random.Generator, beta: float, k_factor: float,
            size: int | None = None):
    los = _cn(rng, size)
    nlos = _cn(rng, size)
    scale = np.sqrt(1.0 / beta) / np.sqrt(k_factor + 1.0)
    return scale * (np.sqrt(k_factor) * los + nlos)


def realize_channel(channel: ChannelParams, n_elements: int, seed: int) -> ChannelRealization:
    """Draw one frame's channel magnitudes.

    Draw order is fixed (direct BS-S, direct S-D, then the BS-panel, panel-S
    and panel-D vectors) so a seed pins the realization bit-for-bit.

    Args:
        channel: geometry and fading constants.
        n_elements: panel size; the three panel links are vectors of this length.
        seed: PRNG seed for numpy's default generator.

    Returns:
        ChannelRealization with magnitudes and squared norms.
    """
    if n_elements < 1:
        raise ValueError(f"n_elements must be >= 1, got {n_elements}")
    rng = np.random.default_rng(seed)

    beta_bs = channel.path_loss(channel.d1, channel.delta1)
    beta_sd = channel.path_loss(channel.d2, channel.delta2)
    d_br = channel.d1 + channel.d_ris_s
    d_rs = channel.d_ris_s
    d_rd = channel.d2 - channel.d_ris_s
    beta_br = channel.path_loss(d_br, channel.delta_ris)
    beta_rs = channel.path_loss(d_rs, channel.delta_ris)
    beta_rd = channel.path_loss(d_rd, channel.delta_ris)

    h_bs = abs(_rician(rng, beta_bs, channel.rician_e))
    h_sd = abs(_rician(rng, beta_sd, channel.rician_s))
    h_br = _rician(rng, beta_br, channel.rician_e, n_elements)
    h_rs = _rician(rng, beta_rs, channel.rician_s, n_elements)
    h_rd = _rician(rng, beta_rd, channel.rician_s, n_elements)

    # per-element cascade magnitudes, averaged over the panel
    h1 = float(np.mean(np.abs(h_rs * h_br)))
    h2 = float(np.mean(np.abs(h_rd * h_rs)))

    norm_hbr_sq = float(np.sum(np.abs(h_br) ** 2))
    norm_hrs_sq = float(np.sum(np.abs(h_rs) ** 2))
    norm_hrd_sq = float(np.sum(np.abs(h_rd) ** 2))

    return ChannelRealization(
        n_elements=n_elements,
        h_bs=float(h_bs),
        h_sd=float(h_sd),
        h1=h1,
        h2=h2,
        h3=h1,
        h4=h2,
        norm_hbr_sq=norm_hbr_sq,
        norm_hsr_sq=norm_hrs_sq,
        norm_hrs_sq=norm_hrs_sq,
        norm_hrd_sq=norm_hrd_sq,
    )
