"""Link-mode planning: per-link DV/CV selection and widest-bottleneck routing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .channel import db_to_transmittance
from .rates import CvRateInput, DvRateInput, skr_cv_asymptotic, skr_dv_finite


class LinkMode(Enum):
    DV = "dv"
    CV = "cv"
    DEAD = "dead"


@dataclass(frozen=True)
class CvLinkProfile:
    v_a: float = 0.45
    eta: float = 0.30
    v_el: float = 0.081
    beta: float = 0.95
    symbol_rate: float = 50e6


@dataclass(frozen=True)
class DvLinkProfile:
    mu1: float = 0.5
    mu2: float = 0.1
    p_mu1: float = 0.7
    p_key_alice: float = 0.9
    basis_split: float = 0.5
    eta_det: float = 0.2
    dark_prob: float = 1e-7
    error_rate: float = 0.006  # intrinsic misalignment error fraction
    f_ec: float = 1.06
    eps_sec: float = 1e-9
    eps_corr: float = 1e-9
    pulse_rate: float = 50e6
    block_size: float = 1e11  # steady-state planning block


@dataclass(frozen=True)
class QLink:
    id: str
    a: str
    b: str
    loss_db: float
    xi_a: float = 0.01
    cv: CvLinkProfile = field(default_factory=CvLinkProfile)
    dv: DvLinkProfile = field(default_factory=DvLinkProfile)

    def __post_init__(self) -> None:
        if self.loss_db < 0:
            raise ValueError("link loss must be >= 0 dB")
        if self.a == self.b:
            raise ValueError(f"link {self.id!r} endpoints must be distinct")


@dataclass(frozen=True)
class ModeAssignment:
    modes: dict  # link id -> LinkMode
    rates: dict  # link id -> bits/s under its chosen mode
    path: tuple = ()  # node sequence, empty when no route exists
    path_links: tuple = ()
    bottleneck_bps: float = 0.0
    connected: bool = False


def expected_dv_counts(link: QLink) -> DvRateInput:
    """Expected one-decoy block counts for a link in steady state.

    Deterministic first-moment bookkeeping: per-intensity click probability
    from Poisson thinning plus dark counts, errors from the intrinsic error
    fraction plus the random half of dark-only clicks.
    """
    d = link.dv
    t = db_to_transmittance(link.loss_db)
    p_dark = 1.0 - (1.0 - d.dark_prob) ** 2
    counts = {}
    for mu, p_mu, tag in ((d.mu1, d.p_mu1, 1), (d.mu2, 1.0 - d.p_mu1, 2)):
        p_sig = 1.0 - math.exp(-mu * t * d.eta_det)
        p_click = 1.0 - (1.0 - p_sig) * (1.0 - p_dark)
        err = (p_sig * d.error_rate + (p_click - p_sig) * 0.5) / p_click if p_click > 0 else 0.0
        n_z = d.block_size * p_mu * d.p_key_alice * d.basis_split * p_click
        n_x = d.block_size * p_mu * (1.0 - d.p_key_alice) * (1.0 - d.basis_split) * p_click
        counts[tag] = (n_z, err * n_z, n_x, err * n_x)
    (n_z1, m_z1, n_x1, m_x1), (n_z2, m_z2, n_x2, m_x2) = counts[1], counts[2]
    return DvRateInput(
        mu1=d.mu1, mu2=d.mu2, p_mu1=d.p_mu1,
        n_z_mu1=n_z1, n_z_mu2=n_z2, m_z_mu1=m_z1, m_z_mu2=m_z2,
        n_x_mu1=n_x1, n_x_mu2=n_x2, m_x_mu1=m_x1, m_x_mu2=m_x2,
        eps_sec=d.eps_sec, eps_corr=d.eps_corr, f_ec=d.f_ec,
        pulse_rate=d.pulse_rate, block_size=d.block_size,
    )


def link_rate(link: QLink, mode: LinkMode) -> float:
    """Secret key rate of a link in bits/s under the given operating mode."""
    if mode is LinkMode.CV:
        c = link.cv
        inp = CvRateInput(v_a=c.v_a, t=db_to_transmittance(link.loss_db), xi_a=link.xi_a,
                          eta=c.eta, v_el=c.v_el, beta=c.beta, symbol_rate=c.symbol_rate)
        return skr_cv_asymptotic(inp).skr_bps
    if mode is LinkMode.DV:
        return skr_dv_finite(expected_dv_counts(link)).skr_bps
    raise ValueError(f"cannot rate a link in mode {mode}")


def best_mode(link: QLink) -> tuple[LinkMode, float]:
    """Argmax-rate mode for one link; ties break toward DV; DEAD if both zero."""
    dv = link_rate(link, LinkMode.DV)
    cv = link_rate(link, LinkMode.CV)
    if dv <= 0.0 and cv <= 0.0:
        return LinkMode.DEAD, 0.0
    return (LinkMode.CV, cv) if cv > dv else (LinkMode.DV, dv)


def assign_modes(links) -> dict:
    """Independent per-link mode assignment."""
    return {link.id: best_mode(link)[0] for link in links}


def best_path(links, src: str, dst: str) -> ModeAssignment:
    """Widest (maximum-bottleneck) route between two nodes.

    Links first get their best mode and rate; the route maximizing the
    minimum link rate is then found by max-min relaxation.  Trusted-node
    relaying is assumed: the end-to-end rate equals the bottleneck.
    """
    links = list(links)
    modes = {}
    rates = {}
    adj: dict = {}
    for link in links:
        mode, rate = best_mode(link)
        modes[link.id] = mode
        rates[link.id] = rate
        adj.setdefault(link.a, []).append((link.b, link.id, rate))
        adj.setdefault(link.b, []).append((link.a, link.id, rate))

    if src not in adj or dst not in adj:
        return ModeAssignment(modes=modes, rates=rates, connected=False)

    # max-min relaxation (Dijkstra variant on bottleneck width)
    width = {node: 0.0 for node in adj}
    width[src] = float("inf")
    prev: dict = {}
    visited: set = set()
    while True:
        candidates = [(w, n) for n, w in width.items() if n not in visited]
        if not candidates:
            break
        w_u, u = max(candidates)
        if u == dst or w_u == 0.0:
            break
        visited.add(u)
        for v, link_id, rate in adj[u]:
            w_new = min(w_u, rate)
            if w_new > width[v]:
                width[v] = w_new
                prev[v] = (u, link_id)

    if width[dst] <= 0.0:
        return ModeAssignment(modes=modes, rates=rates, connected=False)

    path = [dst]
    path_links: list = []
    node = dst
    while node != src:
        node, link_id = prev[node]
        path.append(node)
        path_links.append(link_id)
    return ModeAssignment(
        modes=modes, rates=rates,
        path=tuple(reversed(path)), path_links=tuple(reversed(path_links)),
        bottleneck_bps=float(width[dst]), connected=True,
    )
