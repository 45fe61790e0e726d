"""Seeded Monte-Carlo experiments over eavesdropper channel draws, CSV output, validation suite."""

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel_model import (
    SNR_CONVENTIONS,
    ChannelPair,
    make_bob_dct,
    make_eve_gaussian,
    noise_var_from_snr,
)
from .exceptions import SingularMatrixError
from .info_metrics import CSV_COLUMNS, low_noise_rate, rate_report
from .signal_model import CayleyFamilySpec, build_cayley_family

logger = logging.getLogger(__name__)

BOB_CHANNELS = ("dct", "gaussian")
FLOAT_FMT = "{:.9g}"


class TrialFailedError(RuntimeError):
    """A trial failed twice in a row (original stream and its single resample)."""


@dataclass(frozen=True)
class ScenarioConfig:
    n: int = 10
    mb: int = 6
    me: int = 4
    K: int = 2
    eps: float = 0.01
    snr_db: float = 25.0
    power: float = 1.0
    n_trials: int = 500
    n_samples: int = 20_000
    master_seed: int = 0
    bob_channel: str = "dct"
    snr_convention: str = "per-antenna"

    def __post_init__(self):
        if not (1 <= self.me <= self.mb - 1 < self.mb <= self.n - 1):
            raise ValueError(
                f"need 1 <= me <= mb - 1 < mb < n, got n={self.n}, mb={self.mb}, me={self.me}"
            )
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.bob_channel not in BOB_CHANNELS:
            raise ValueError(f"bob_channel must be one of {BOB_CHANNELS}")
        if self.snr_convention not in SNR_CONVENTIONS:
            raise ValueError(f"snr_convention must be one of {SNR_CONVENTIONS}")
        if self.n_trials < 1 or self.n_samples < 2:
            raise ValueError("need n_trials >= 1 and n_samples >= 2")

    @property
    def noise_var(self):
        return noise_var_from_snr(self.snr_db, self.power, self.n, self.snr_convention)

    def family_spec(self, eps=None):
        return CayleyFamilySpec(self.n, self.mb, self.K, self.power, self.eps if eps is None else eps)


def trial_seed(master_seed, trial, attempt=0):
    """64-bit seed of trial ``trial`` derived by counter from the master seed."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial, attempt))
    return int(ss.generate_state(1, np.uint64)[0])


def draw_channels(cfg, rng):
    """Bob's channel (DCT rows, or Gaussian drawn first from ``rng``) then Eve's."""
    if cfg.bob_channel == "dct":
        phi_b = make_bob_dct(cfg.n, cfg.mb)
    else:
        phi_b = make_eve_gaussian(cfg.n, cfg.mb, rng)
    phi_e = make_eve_gaussian(cfg.n, cfg.me, rng)
    return ChannelPair(phi_b, phi_e, cfg.noise_var)


def run_rates(cfg, seed):
    """One instance: channels and Monte-Carlo draws all come from ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    src = build_cayley_family(cfg.family_spec())
    chans = draw_channels(cfg, rng)
    return rate_report(src, chans, cfg.n_samples, rng)


def _with_resample(fn, cfg, t):
    seed = trial_seed(cfg.master_seed, t)
    try:
        return seed, fn(cfg, seed)
    except SingularMatrixError as exc:
        logger.warning("trial %d (seed %d) failed: %s; resampling once", t, seed, exc)
    seed = trial_seed(cfg.master_seed, t, attempt=1)
    try:
        return seed, fn(cfg, seed)
    except SingularMatrixError as exc:
        raise TrialFailedError(f"trial {t} failed twice (last seed {seed}): {exc}") from exc


def _cdf_trial(args):
    cfg, t = args
    return _with_resample(run_rates, cfg, t)


def _map_trials(fn, cfg, jobs):
    tasks = [(cfg, t) for t in range(cfg.n_trials)]
    if jobs <= 1:
        return [fn(a) for a in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


@dataclass
class CdfResult:
    """Per-trial rate reports of a CDF run, kept in trial order."""

    config: ScenarioConfig
    seeds: list
    reports: list

    def values(self, name):
        """Sorted per-trial values of ``name`` (a ``CSV_COLUMNS`` entry)."""
        col = CSV_COLUMNS.index(name)
        return np.sort(np.array([r.csv_values()[col] for r in self.reports]))

    def cdf(self, name, x):
        """Right-continuous empirical CDF of ``name`` at ``x``."""
        v = self.values(name)
        return np.searchsorted(v, x, side="right") / v.size

    def leakage_fraction(self, threshold=0.1):
        """Fraction of trials where Eve's information exceeds ``threshold`` times the code rate."""
        eve = np.array([r.mi_eve_mc.value for r in self.reports])
        rc = np.array([r.code_rate for r in self.reports])
        return float(np.mean(eve > threshold * rc))

    def to_csv(self):
        buf = io.StringIO()
        _write_header(buf, self.config)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("trial", "seed") + CSV_COLUMNS)
        for t, (seed, rep) in enumerate(zip(self.seeds, self.reports)):
            w.writerow([t, seed] + [FLOAT_FMT.format(v) for v in rep.csv_values()])
        return buf.getvalue()


def _write_header(buf, cfg, **extra):
    for key, value in {**asdict(cfg), **extra}.items():
        buf.write(f"# {key}={value}\n")


def run_cdf(cfg, jobs=1):
    """Rate reports over ``cfg.n_trials`` independent channel draws.

    Trial ``t`` uses the stream ``trial_seed(master_seed, t)``; results do not
    depend on ``jobs``.
    """
    out = _map_trials(_cdf_trial, cfg, jobs)
    return CdfResult(cfg, [s for s, _ in out], [r for _, r in out])


def _lownoise_trial(args):
    (cfg, eps_grid), t = args

    def one(cfg, seed):
        rng = np.random.default_rng(seed)
        phi_e = make_eve_gaussian(cfg.n, cfg.me, rng)
        return [low_noise_rate(build_cayley_family(cfg.family_spec(e)), phi_e) for e in eps_grid]

    return _with_resample(one, cfg, t)


@dataclass
class SweepResult:
    config: ScenarioConfig
    eps_grid: tuple
    rates: np.ndarray = field(repr=False)  # (n_trials, len(eps_grid)), bits

    def table(self):
        r = self.rates
        return [
            {
                "eps": e,
                "mean": float(r[:, j].mean()),
                "min": float(r[:, j].min()),
                "max": float(r[:, j].max()),
                "std": float(r[:, j].std(ddof=1)) if r.shape[0] > 1 else 0.0,
                "n_trials": r.shape[0],
            }
            for j, e in enumerate(self.eps_grid)
        ]

    def to_csv(self):
        buf = io.StringIO()
        _write_header(buf, self.config, eps_grid=",".join(map(str, self.eps_grid)))
        w = csv.writer(buf, lineterminator="\n")
        cols = ("eps", "mean", "min", "max", "std", "n_trials")
        w.writerow(cols)
        for row in self.table():
            w.writerow(
                [FLOAT_FMT.format(row[c]) if c != "n_trials" else row[c] for c in cols]
            )
        return buf.getvalue()


def run_lownoise_sweep(cfg, eps_grid, jobs=1):
    """Noiseless-limit secrecy rate over ``cfg.n_trials`` Eve channels for each ``eps``.

    Each trial draws one Eve channel and evaluates every ``eps`` on it.
    """
    eps_grid = tuple(float(e) for e in eps_grid)
    tasks_cfg = (cfg, eps_grid)
    tasks = [(tasks_cfg, t) for t in range(cfg.n_trials)]
    if jobs <= 1:
        out = [_lownoise_trial(a) for a in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_lownoise_trial, tasks))
    return SweepResult(cfg, eps_grid, np.array([r for _, r in out]))


def run_validate(seed=0, faults=(), out=None):
    """Run the invariant suite and print one line per check.

    ``faults`` injects known defects for negative controls; the only one
    supported is ``"nonorthogonal_w"``. Returns ``(all_passed, results)``.
    """
    from .validation import CHECKS

    results = []
    rng_root = np.random.SeedSequence(seed)
    for check, ss in zip(CHECKS, rng_root.spawn(len(CHECKS))):
        start = time.perf_counter()
        try:
            passed, detail = check(np.random.default_rng(ss), faults)
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((check.__name__, bool(passed), detail, time.perf_counter() - start))
    width = max(len(r[0]) for r in results)
    for name, passed, detail, secs in results:
        line = f"{'PASS' if passed else 'FAIL'}  {name:<{width}}  {secs:6.2f}s  {detail}"
        print(line, file=out)
    ok = all(r[1] for r in results)
    print(f"{sum(r[1] for r in results)}/{len(results)} checks passed", file=out)
    return ok, results
