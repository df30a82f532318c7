"""Monte Carlo estimators of the cut-set upper bound and the
decode-and-forward achievable rate under receiver-only CSI with equal
transmit power per antenna, plus the high-SNR closed form."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel, matrixkit
from .channel import FadingModel, NetworkGeometry

_MASK64 = (1 << 64) - 1
_LN2 = math.log(2.0)

# digamma(1) = -(Euler-Mascheroni constant), 15 significant digits.
PSI_ONE = -0.577215664901533

# Canonical per-sample draw order within a stream. Every estimator consumes
# (or skips) link batches in this order, so per-sample realizations are
# aligned across estimators sharing a seed.
_LINK_ORDER = ("sr", "sd", "rd", "rd2")


@dataclass(frozen=True)
class ScenarioConfig:
    """Powers, antenna counts, path-loss exponent, per-link fading, target rate.

    Powers are linear (10 dB == 10). Defaults follow the reference scenario:
    two antennas everywhere, alpha = 3.52, rate target 5.5 bits.
    """

    P_s: float = 10.0
    P_r: float = 10.0
    N_s: int = 2
    N_r: int = 2
    M_r: int = 2
    M_d: int = 2
    alpha: float = 3.52
    fading_sr: FadingModel = field(default_factory=FadingModel.rayleigh)
    fading_sd: FadingModel = field(default_factory=FadingModel.rayleigh)
    fading_rd: FadingModel = field(default_factory=FadingModel.rayleigh)
    R_c: float = 5.5

    def __post_init__(self):
        if self.P_s <= 0 or self.P_r <= 0:
            raise ValueError("transmit powers must be > 0")
        for name in ("N_s", "N_r", "M_r", "M_d"):
            if getattr(self, name) < 1:
                raise ValueError(f"antenna count {name} must be >= 1")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.R_c <= 0:
            raise ValueError(f"R_c must be > 0, got {self.R_c}")


@dataclass(frozen=True)
class McConfig:
    """Deterministic Monte Carlo setup: seed, sample count, stream count.

    Sample i is served by stream (i mod streams); each stream owns an
    independent counter-based generator keyed by (seed, stream id). When
    samples is not divisible by streams the count is padded up so all
    streams are equally loaded; samples_used reports the padded total.
    """

    seed: int = 42
    samples: int = 20000
    streams: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.streams < 1:
            raise ValueError(f"streams must be >= 1, got {self.streams}")

    @property
    def per_stream(self) -> int:
        return -(-self.samples // self.streams)

    @property
    def samples_used(self) -> int:
        return self.per_stream * self.streams


@dataclass(frozen=True)
class BoundEstimate:
    """Monte Carlo mean with its standard error, both in bits."""

    mean: float
    std_error: float
    samples_used: int


@dataclass(frozen=True)
class BoundSamples:
    """Per-realization bound values on common channel draws.

    Arrays are ordered stream-major (all of stream 0, then stream 1, ...),
    which is the deterministic reduction order of the estimators. coop is
    present only when a second relay distance was supplied.
    """

    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    coop: np.ndarray | None = None


def stream_generators(mc: McConfig) -> list[np.random.Generator]:
    """One counter-based generator per stream, keyed by (seed, stream id)."""
    key0 = mc.seed & _MASK64
    return [
        np.random.Generator(np.random.Philox(key=np.array([key0, s], dtype=np.uint64)))
        for s in range(mc.streams)
    ]


def digamma(x: float) -> float:
    """Digamma function for x > 0: upward recurrence, then the asymptotic
    series in x^-2 (accurate to ~1e-13 after shifting past 10)."""
    if x <= 0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (
        1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))))
    return acc + math.log(x) - 0.5 / x - series


def summarize_samples(values: np.ndarray) -> BoundEstimate:
    n = values.size
    mean = float(np.mean(values))
    if n < 2:
        return BoundEstimate(mean, 0.0, n)
    se = float(np.std(values, ddof=1) / math.sqrt(n))
    return BoundEstimate(mean, se, n)


def _link_shapes(scn: ScenarioConfig) -> dict[str, tuple[int, int]]:
    return {
        "sr": (scn.M_r, scn.N_s),
        "sd": (scn.M_d, scn.N_s),
        "rd": (scn.M_d, scn.N_r),
        "rd2": (scn.M_d, scn.N_r),
    }


def _link_models(scn: ScenarioConfig) -> dict[str, FadingModel]:
    return {"sr": scn.fading_sr, "sd": scn.fading_sd,
            "rd": scn.fading_rd, "rd2": scn.fading_rd}


def draw_links(scn: ScenarioConfig, mc: McConfig,
               need: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Draw normalized (unit-distance) link batches for the needed links.

    Links preceding a needed link in the canonical order are skipped by
    consuming the same amount of generator state, which keeps per-sample
    draws aligned across estimators that need different link subsets.
    Returns arrays of shape (samples_used, rows, cols), stream-major.
    """
    shapes = _link_shapes(scn)
    models = _link_models(scn)
    last = max(_LINK_ORDER.index(name) for name in need)
    parts: dict[str, list[np.ndarray]] = {name: [] for name in need}
    per = mc.per_stream
    for rng in stream_generators(mc):
        for name in _LINK_ORDER[: last + 1]:
            rows, cols = shapes[name]
            if name in need:
                parts[name].append(channel.sample_link_batch(
                    models[name], per, rows, cols, 1.0, scn.alpha, rng))
            else:
                matrixkit.skip_complex_gaussian_batch(per, rows, cols, rng)
    return {name: np.concatenate(blocks, axis=0) for name, blocks in parts.items()}


def _check_distance(name: str, value: float) -> None:
    if value <= 0:
        raise ValueError(f"{name} must be > 0, got {value}")


# Link batches each bound statistic consumes.
_BOUND_LINKS = {
    "c1": ("sr", "sd"),
    "c2": ("sd", "rd"),
    "c3": ("sr",),
    "coop": ("sd", "rd", "rd2"),
}


def _bound_arrays(scn: ScenarioConfig, mc: McConfig, need: tuple[str, ...],
                  r_R: float | None = None, r_D: float | None = None,
                  r_DR: float | None = None, r_DR2: float | None = None,
                  P_r2: float | None = None) -> dict[str, np.ndarray]:
    """Requested per-realization bound arrays on common channel draws.

    Only the links any requested bound consumes are drawn (earlier links in
    the canonical order are skipped, not saved), so per-sample draws stay
    aligned across arbitrary bound subsets under one seed.
    """
    links_needed = tuple(sorted(
        {link for bound in need for link in _BOUND_LINKS[bound]},
        key=_LINK_ORDER.index))
    for name, value in (("r_R", r_R), ("r_D", r_D), ("r_DR", r_DR),
                        ("r_DR2", r_DR2)):
        if value is not None:
            _check_distance(name, value)
    links = draw_links(scn, mc, links_needed)
    out: dict[str, np.ndarray] = {}

    if "c3" in need:
        a_sr = (scn.P_s / scn.N_s) * r_R ** (-scn.alpha)
        out["c3"] = matrixkit.logdet_identity_plus_batch(
            a_sr * matrixkit.gram(links["sr"]))

    mac = None
    if "c2" in need or "coop" in need:
        a_sd = (scn.P_s / scn.N_s) * r_D ** (-scn.alpha)
        a_rd = (scn.P_r / scn.N_r) * r_DR ** (-scn.alpha)
        mac = a_sd * matrixkit.gram(links["sd"]) + a_rd * matrixkit.gram(links["rd"])
    if "c2" in need:
        out["c2"] = matrixkit.logdet_identity_plus_batch(mac)
    if "coop" in need:
        p2 = scn.P_r if P_r2 is None else P_r2
        if p2 < 0:
            raise ValueError(f"second relay power must be >= 0, got {p2}")
        a_rd2 = (p2 / scn.N_r) * r_DR2 ** (-scn.alpha)
        out["coop"] = matrixkit.logdet_identity_plus_batch(
            mac + a_rd2 * matrixkit.gram(links["rd2"]))

    if "c1" in need:
        H_bc = np.concatenate([
            r_D ** (-scn.alpha / 2.0) * links["sd"],
            r_R ** (-scn.alpha / 2.0) * links["sr"],
        ], axis=-2)
        out["c1"] = matrixkit.logdet_identity_plus_batch(
            (scn.P_s / scn.N_s) * matrixkit.gram(H_bc))
    return out


def c3_samples(scn: ScenarioConfig, r_R: float, mc: McConfig) -> np.ndarray:
    """Per-realization source-relay rate log2 det(I + (P_s/N_s) r_R^-a H H†)."""
    return _bound_arrays(scn, mc, ("c3",), r_R=r_R)["c3"]


def estimate_c3(scn: ScenarioConfig, r_R: float, mc: McConfig) -> BoundEstimate:
    """Ergodic rate of the source-relay link at relay radius r_R."""
    return summarize_samples(c3_samples(scn, r_R, mc))


def estimate_c2(scn: ScenarioConfig, r_D: float, r_DR: float,
                mc: McConfig) -> BoundEstimate:
    """Ergodic multiple-access rate at the destination.

    Mean of log2 det(I + (P_s/N_s) r_D^-a H_sd H_sd† +
    (P_r/N_r) r_DR^-a H_rd H_rd†) over common draws.
    """
    arrays = _bound_arrays(scn, mc, ("c2",), r_D=r_D, r_DR=r_DR)
    return summarize_samples(arrays["c2"])


def estimate_c1(scn: ScenarioConfig, r_D: float, r_R: float,
                mc: McConfig) -> BoundEstimate:
    """Ergodic broadcast-cut rate: destination and relay rows stacked.

    Mean of log2 det(I_M + (P_s/N_s) H_bc H_bc†) with M = M_r + M_d and
    H_bc stacking the path-loss-scaled source-destination and source-relay
    links.
    """
    arrays = _bound_arrays(scn, mc, ("c1",), r_R=r_R, r_D=r_D)
    return summarize_samples(arrays["c1"])


def sample_bound_realizations(scn: ScenarioConfig, r_R: float, r_D: float,
                              r_DR: float, mc: McConfig,
                              r_DR2: float | None = None,
                              P_r2: float | None = None) -> BoundSamples:
    """Per-realization c1, c2, c3 (and cooperative sum-rate) on common draws.

    All bounds for one scenario share the per-sample channel realizations,
    so orderings like c1 >= c3 hold pointwise. Supplying r_DR2 adds the
    second relay's receive term and fills the coop array; P_r2 overrides
    the second relay's transmit power (default: scn.P_r).
    """
    need = ("c1", "c2", "c3")
    if r_DR2 is not None:
        need = ("c1", "c2", "c3", "coop")
    arrays = _bound_arrays(scn, mc, need, r_R=r_R, r_D=r_D, r_DR=r_DR,
                           r_DR2=r_DR2, P_r2=P_r2)
    return BoundSamples(c1=arrays["c1"], c2=arrays["c2"], c3=arrays["c3"],
                        coop=arrays.get("coop"))


def resolve_distances(geom: NetworkGeometry) -> tuple[float, float, float]:
    """(r_R, r_D, r_DR) for the serving relay of the destination's sector.

    r_DR is floored at MIN_LINK_DISTANCE so a destination collocated with
    its relay keeps the estimators finite (the multiple-access term then
    dominates and the decode-and-forward minimum falls to the relay link).
    """
    _, phi = channel.sector_of(geom)
    r_DR = channel.relay_dest_distance(geom.dest_radius, geom.relay_radius, phi)
    return (geom.relay_radius, geom.dest_radius,
            max(r_DR, channel.MIN_LINK_DISTANCE))


def df_rate(scn: ScenarioConfig, geom: NetworkGeometry, mc: McConfig,
            min_of_means: bool = False) -> BoundEstimate:
    """Decode-and-forward achievable rate min(c3, c2) for the geometry.

    The minimum is taken per realization before averaging (common draws);
    min_of_means=True instead returns the smaller of the two Monte Carlo
    means, with that component's standard error.
    """
    r_R, r_D, r_DR = resolve_distances(geom)
    arrays = _bound_arrays(scn, mc, ("c2", "c3"), r_R=r_R, r_D=r_D, r_DR=r_DR)
    if min_of_means:
        e3, e2 = summarize_samples(arrays["c3"]), summarize_samples(arrays["c2"])
        return e3 if e3.mean <= e2.mean else e2
    return summarize_samples(np.minimum(arrays["c3"], arrays["c2"]))


def cutset_bound(scn: ScenarioConfig, geom: NetworkGeometry, mc: McConfig,
                 min_of_means: bool = False) -> BoundEstimate:
    """Cut-set upper bound min(c1, c2) for the geometry (common draws)."""
    r_R, r_D, r_DR = resolve_distances(geom)
    arrays = _bound_arrays(scn, mc, ("c1", "c2"), r_R=r_R, r_D=r_D, r_DR=r_DR)
    if min_of_means:
        e1, e2 = summarize_samples(arrays["c1"]), summarize_samples(arrays["c2"])
        return e1 if e1.mean <= e2.mean else e2
    return summarize_samples(np.minimum(arrays["c1"], arrays["c2"]))


def high_snr_rate(m: int, n: int, N_s: int, rho: float) -> float:
    """High-SNR ergodic-capacity closed form, in bits.

    m log2(rho e^psi(1) / N_s) + (1/ln 2) sum_{p=1..m} sum_{q=1..n-p} 1/q,
    with m = min and n = max of the link's antenna counts and rho the
    received SNR.
    """
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    if m < 1 or n < m:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if N_s < 1:
        raise ValueError(f"N_s must be >= 1, got {N_s}")
    harmonic = sum(1.0 / q for p in range(1, m + 1) for q in range(1, n - p + 1))
    return m * math.log2(rho * math.exp(PSI_ONE) / N_s) + harmonic / _LN2
