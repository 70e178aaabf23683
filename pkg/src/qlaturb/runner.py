"""Run orchestration: configs, the main loop, outputs, recurrence detection."""

import configparser
import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import diagnostics, initial, spectra, vortex
from .lattice import CouplingParams, Grid, SpinorField, load_state, save_state, step


class ConfigError(Exception):
    """Invalid run configuration."""


class NumericalError(Exception):
    """The field stopped being finite mid-run."""


@dataclass(frozen=True)
class GaussianVortexInit:
    cloud: initial.GaussianCloudParams
    vortices: tuple


@dataclass(frozen=True)
class RandomPhaseInit:
    m: int
    amplitude: float


@dataclass
class RunConfig:
    grid: Grid
    g: float
    init: object
    steps: int
    out: Path
    sample_every: int = 10
    spectra_every: int = 100
    dump_every: int = 0
    checkpoint_every: int = 0
    seed: int = 1
    fit_windows: tuple = ()
    fit_which: str = "ic"
    allow_attractive: bool = False
    recurrence_kappa: float = 3.0

    def validate(self):
        if self.steps < 0:
            raise ConfigError(f"steps must be >= 0, got {self.steps}")
        for name in ("sample_every", "spectra_every", "dump_every", "checkpoint_every"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0 (0 disables), got {getattr(self, name)}")
        if self.g < 0 and not self.allow_attractive:
            raise ConfigError(
                f"negative coupling g={self.g} rejected; set allow_attractive = true to override"
            )
        if self.fit_which not in ("ic", "c", "both"):
            raise ConfigError(f"fit channel must be ic, c or both, got {self.fit_which!r}")
        for lo, hi in self.fit_windows:
            if not lo < hi:
                raise ConfigError(f"fit window [{lo}, {hi}] needs k_min < k_max")
        if isinstance(self.init, RandomPhaseInit) and self.grid.L % self.init.m != 0:
            raise ConfigError(
                f"fragmentation level m={self.init.m} must divide L={self.grid.L}"
            )


@dataclass
class RecurrenceReport:
    """Sample-aligned peak/dip times of the recurrence signatures."""

    ei_peaks: list = dc_field(default_factory=list)
    eic_dips: list = dc_field(default_factory=list)
    z_dips: list = dc_field(default_factory=list)
    t_half: int | None = None
    t_full: int | None = None
    kappa: float = 3.0

    @property
    def empty(self):
        return not (self.ei_peaks or self.eic_dips or self.z_dips)

    def as_dict(self):
        return {
            "ei_peaks": self.ei_peaks,
            "eic_dips": self.eic_dips,
            "z_dips": self.z_dips,
            "t_half": self.t_half,
            "t_full": self.t_full,
            "kappa": self.kappa,
        }


def _excursion_extrema(times, values, threshold, find_peaks, burn_index):
    """One representative time per contiguous threshold excursion.

    Excursions that begin inside the burn-in window are dropped: the initial
    condition itself is not a recurrence.
    """
    mask = values > threshold if find_peaks else values < threshold
    out = []
    i, n = 0, len(values)
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j < n and mask[j]:
            j += 1
        if i > burn_index:
            seg = values[i:j]
            k = int(np.argmax(seg)) if find_peaks else int(np.argmin(seg))
            out.append(int(times[i + k]))
        i = j
    return out


def detect_recurrence(records, kappa=3.0, burn_frac=0.05):
    """Find E_I peaks and E_IC / Z dips against a median +- kappa * IQR band.

    T_P/2 is the first strong E_I peak and T_P the second; when E_I shows no
    peaks the dip channels are consulted in turn.  An empty report is a valid
    outcome (the strongly interacting regime loses the short recurrence).
    """
    if len(records) < 100:
        raise ValueError(f"recurrence detection needs >= 100 samples, got {len(records)}")
    times = np.array([r.t for r in records], dtype=np.int64)
    burn_index = int(math.ceil(burn_frac * len(records)))

    report = RecurrenceReport(kappa=kappa)
    for attr, channel, find_peaks in (("E_I", "ei_peaks", True),
                                      ("E_IC", "eic_dips", False),
                                      ("Z", "z_dips", False)):
        y = np.array([getattr(r, attr) for r in records], dtype=np.float64)
        med = np.median(y)
        iqr = np.percentile(y, 75) - np.percentile(y, 25)
        thr = med + kappa * iqr if find_peaks else med - kappa * iqr
        setattr(report, channel, _excursion_extrema(times, y, thr, find_peaks, burn_index))

    for channel in (report.ei_peaks, report.eic_dips, report.z_dips):
        if channel:
            report.t_half = channel[0]
            if len(channel) > 1:
                report.t_full = channel[1]
            break
    return report


# ---------------------------------------------------------------------------
# configuration files


def _parse_vortex_list(text):
    specs = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = [b.strip() for b in part.split(",")]
        if len(bits) != 3:
            raise ConfigError(f"vortex entry {part!r} is not 'x,y,winding'")
        specs.append(initial.VortexSpec(float(bits[0]), float(bits[1]), int(bits[2])))
    return tuple(specs)


def _parse_windows(text):
    windows = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ConfigError(f"fit window {part!r} is not 'kmin:kmax'")
        lo, hi = part.split(":", 1)
        windows.append((float(lo), float(hi)))
    return tuple(windows)


def _build_init(kind, section, grid):
    if kind == "gaussian_vortices":
        cloud = initial.GaussianCloudParams(
            h=section.getfloat("h", 0.05),
            a=section.getfloat("a", 0.01),
            w_g=section.getfloat("w_g", 0.01),
        )
        if "vortices" in section:
            specs = _parse_vortex_list(section["vortices"])
        else:
            spacing = section.getfloat("spacing", grid.L / 4.0)
            winding = section.getint("winding", 1)
            specs = tuple(initial.four_vortex_lattice(grid, spacing, winding))
        return GaussianVortexInit(cloud, specs)
    if kind == "random_phase":
        return RandomPhaseInit(
            m=section.getint("m", 8),
            amplitude=section.getfloat("amplitude", 1.0),
        )
    raise ConfigError(f"unknown init type {kind!r} "
                      "(expected gaussian_vortices or random_phase)")


def load_config(path=None, overrides=None):
    """Build a RunConfig from an INI file plus CLI-style overrides.

    Every command-line flag mirrors a config key; overrides win.
    """
    cp = configparser.ConfigParser()
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        cp.read(path)
    ov = overrides or {}

    def pick(section, key, cast, default):
        if key in ov and ov[key] is not None:
            return ov[key]
        if cp.has_option(section, key):
            try:
                return cast(cp.get(section, key))
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from exc
        return default

    try:
        L = int(pick("grid", "L", int, 0))
        dx = float(pick("grid", "dx", float, 1.0))
        if L <= 0:
            raise ConfigError("grid size L must be set (config [grid] L or --grid)")
        grid = Grid(L, dx)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    g = float(pick("physics", "g", float, 0.0))
    allow_attractive = bool(pick("physics", "allow_attractive",
                                 lambda s: s.lower() in ("1", "true", "yes"), False))

    kind = pick("init", "type", str, "random_phase")
    init_section = cp["init"] if cp.has_section("init") else cp["DEFAULT"]
    init_spec = _build_init(kind, init_section, grid)
    if isinstance(init_spec, RandomPhaseInit):
        if "init_m" in ov and ov["init_m"] is not None:
            init_spec = RandomPhaseInit(int(ov["init_m"]), init_spec.amplitude)

    out = pick("run", "out", str, None)
    if out is None:
        raise ConfigError("output directory must be set (config [run] out or --out)")

    windows = pick("fit", "windows", _parse_windows, ())
    if isinstance(windows, str):
        windows = _parse_windows(windows)

    cfg = RunConfig(
        grid=grid,
        g=g,
        init=init_spec,
        steps=int(pick("run", "steps", int, 0)),
        out=Path(out),
        sample_every=int(pick("run", "sample_every", int, 10)),
        spectra_every=int(pick("run", "spectra_every", int, 100)),
        dump_every=int(pick("run", "dump_every", int, 0)),
        checkpoint_every=int(pick("run", "checkpoint_every", int, 0)),
        seed=int(pick("run", "seed", int, 1)),
        fit_windows=tuple(windows),
        fit_which=pick("fit", "which", str, "ic"),
        allow_attractive=allow_attractive,
        recurrence_kappa=float(pick("run", "recurrence_kappa", float, 3.0)),
    )
    cfg.validate()
    return cfg


def write_config(cfg, path):
    """Echo the effective configuration (read back by resume)."""
    cp = configparser.ConfigParser()
    cp["grid"] = {"L": str(cfg.grid.L), "dx": repr(cfg.grid.dx)}
    cp["physics"] = {"g": repr(cfg.g), "allow_attractive": str(cfg.allow_attractive).lower()}
    if isinstance(cfg.init, GaussianVortexInit):
        cp["init"] = {
            "type": "gaussian_vortices",
            "h": repr(cfg.init.cloud.h),
            "a": repr(cfg.init.cloud.a),
            "w_g": repr(cfg.init.cloud.w_g),
            "vortices": "; ".join(f"{v.x!r},{v.y!r},{v.winding}" for v in cfg.init.vortices),
        }
    else:
        cp["init"] = {
            "type": "random_phase",
            "m": str(cfg.init.m),
            "amplitude": repr(cfg.init.amplitude),
        }
    cp["run"] = {
        "steps": str(cfg.steps),
        "out": str(cfg.out),
        "sample_every": str(cfg.sample_every),
        "spectra_every": str(cfg.spectra_every),
        "dump_every": str(cfg.dump_every),
        "checkpoint_every": str(cfg.checkpoint_every),
        "seed": str(cfg.seed),
        "recurrence_kappa": repr(cfg.recurrence_kappa),
    }
    cp["fit"] = {
        "windows": ", ".join(f"{lo:g}:{hi:g}" for lo, hi in cfg.fit_windows),
        "which": cfg.fit_which,
    }
    with open(path, "w") as fh:
        cp.write(fh)


def build_initial_state(cfg):
    if isinstance(cfg.init, GaussianVortexInit):
        psi = initial.gaussian_vortex_state(cfg.grid, cfg.init.cloud, cfg.init.vortices)
    elif isinstance(cfg.init, RandomPhaseInit):
        params = initial.RandomPhaseParams(cfg.init.m, cfg.seed, cfg.init.amplitude)
        psi = initial.random_phase_state(cfg.grid, params)
    else:
        raise ConfigError(f"unsupported init spec {cfg.init!r}")
    return SpinorField.from_wavefunction(cfg.grid, psi)


# ---------------------------------------------------------------------------
# the main loop


def _state_name(t):
    return f"state_t{t:08d}.qst"


class _OutputTree:
    def __init__(self, root, append=False, with_energies=True):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "spectra").mkdir(exist_ok=True)
        (self.root / "vortices").mkdir(exist_ok=True)
        (self.root / "dumps").mkdir(exist_ok=True)
        (self.root / "checkpoints").mkdir(exist_ok=True)
        self.energy_csv = None
        if with_energies:
            self.energy_csv = open(self.root / "energies.csv", "a" if append else "w")
            if not append:
                self.energy_csv.write(diagnostics.ENERGY_HEADER + "\n")

    def energy(self, rec):
        self.energy_csv.write(diagnostics.energy_row(rec) + "\n")
        self.energy_csv.flush()

    def spectrum(self, rec):
        path = self.root / "spectra" / f"spectrum_t{rec.t:08d}.csv"
        with open(path, "w") as fh:
            fh.write(spectra.SPECTRUM_HEADER + "\n")
            for row in spectra.spectrum_rows(rec):
                fh.write(row + "\n")

    def vortices(self, vset):
        path = self.root / "vortices" / f"vortices_t{vset.t:08d}.csv"
        with open(path, "w") as fh:
            fh.write(vortex.VORTEX_HEADER + "\n")
            for row in vortex.vortex_rows(vset):
                fh.write(row + "\n")

    def vortex_series(self, rows):
        with open(self.root / "vortex_series.csv", "w") as fh:
            fh.write(vortex.SERIES_HEADER + "\n")
            for row in vortex.series_rows(rows):
                fh.write(row + "\n")

    def close(self):
        if self.energy_csv is not None:
            self.energy_csv.close()


def _sample(field, g, records, out):
    psi = field.psi
    hydro = diagnostics.hydro_fields(psi, field.grid)
    rec = diagnostics.energies(psi, g, field.grid, t=field.t, hydro=hydro)
    records.append(rec)
    ratios = [r.E_I / r.E_K for r in records if r.E_K > 0]
    rec.gamma_running = float(np.mean(ratios)) if ratios else math.nan
    out.energy(rec)
    return hydro


def _snapshot(field, hydro, out, vortex_sets):
    rec = spectra.spectrum_record(hydro.qx, hydro.qy, field.grid, t=field.t)
    out.spectrum(rec)
    vset = vortex.detect_vortices(field.psi, t=field.t)
    out.vortices(vset)
    vortex_sets.append(vset)
    return rec


def _due(t, every):
    return every > 0 and t % every == 0


def _finite(field):
    return bool(np.isfinite(field.q0).all() and np.isfinite(field.q1).all())


def _fit_all(cfg, spectrum_records):
    channels = ("ic", "c") if cfg.fit_which == "both" else (cfg.fit_which,)
    rows, fits = [], []
    for rec in spectrum_records:
        for lo, hi in cfg.fit_windows:
            for which in channels:
                try:
                    fit = spectra.fit_powerlaw(rec, which, lo, hi)
                except ValueError:
                    continue
                fits.append((rec.t, fit))
                rows.append(spectra.fit_row(rec.t, fit))
    return rows, fits


def _summarize(cfg, records, spectrum_records, vortex_sets, out):
    rows, fits = _fit_all(cfg, spectrum_records)
    if rows:
        with open(out.root / "fits.csv", "w") as fh:
            fh.write(spectra.FIT_HEADER + "\n")
            fh.write("\n".join(rows) + "\n")

    out.vortex_series(vortex.vortex_count_series(vortex_sets))

    try:
        gamma = diagnostics.gamma_ratio(records)
    except ValueError:
        gamma = None
    if len(records) >= 100:
        recurrence = detect_recurrence(records, kappa=cfg.recurrence_kappa)
    else:
        recurrence = RecurrenceReport(kappa=cfg.recurrence_kappa)

    fit_summary = {}
    for t, fit in fits:
        key = f"{fit.which}[{fit.k_min:g}:{fit.k_max:g}]"
        fit_summary.setdefault(key, []).append(fit.alpha)
    fit_summary = {k: {"mean_alpha": float(np.mean(v)), "n": len(v)}
                   for k, v in fit_summary.items()}

    summary = {
        "steps": cfg.steps,
        "samples": len(records),
        "gamma": gamma,
        "recurrence": recurrence.as_dict(),
        "fits": fit_summary,
    }
    with open(out.root / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary


def _advance(cfg, field, records, spectrum_records, vortex_sets, out, t_end):
    params = CouplingParams(cfg.g)
    last_good = field.copy()
    while field.t < t_end:
        try:
            step(field, params)
        except ValueError as exc:
            save_state(last_good, cfg.g, out.root / "checkpoints" / "last_good.qst")
            raise NumericalError(
                f"step failed at t={field.t + 1}: {exc}; last good state "
                f"(t={last_good.t}) saved to checkpoints/last_good.qst"
            ) from exc
        t = field.t
        sampled_hydro = None
        if _due(t, cfg.sample_every) or t == t_end:
            if not _finite(field):
                save_state(last_good, cfg.g, out.root / "checkpoints" / "last_good.qst")
                raise NumericalError(
                    f"field is not finite at t={t}; last good state (t={last_good.t}) "
                    f"saved to checkpoints/last_good.qst"
                )
        if _due(t, cfg.sample_every):
            sampled_hydro = _sample(field, cfg.g, records, out)
            last_good = field.copy()
        if _due(t, cfg.spectra_every):
            hydro = sampled_hydro or diagnostics.hydro_fields(field.psi, field.grid)
            spectrum_records.append(_snapshot(field, hydro, out, vortex_sets))
        if _due(t, cfg.dump_every):
            save_state(field, cfg.g, out.root / "dumps" / _state_name(t))
        if _due(t, cfg.checkpoint_every):
            save_state(field, cfg.g, out.root / "checkpoints" / _state_name(t))
    save_state(field, cfg.g, out.root / "checkpoints" / _state_name(field.t))


def run(cfg):
    """Execute a configured run; returns the summary dict.

    Deterministic for a fixed config and seed: outputs are bit-identical
    across repeats, and a checkpointed run continues bit-identically.
    """
    cfg.validate()
    out = _OutputTree(cfg.out)
    write_config(cfg, out.root / "config.ini")
    field = build_initial_state(cfg)

    records, spectrum_records, vortex_sets = [], [], []
    hydro = _sample(field, cfg.g, records, out)
    if cfg.spectra_every > 0:
        spectrum_records.append(_snapshot(field, hydro, out, vortex_sets))
    if cfg.dump_every > 0:
        save_state(field, cfg.g, out.root / "dumps" / _state_name(0))

    try:
        _advance(cfg, field, records, spectrum_records, vortex_sets, out, cfg.steps)
        return _summarize(cfg, records, spectrum_records, vortex_sets, out)
    finally:
        out.close()


def _latest_checkpoint(out_dir):
    ck_dir = Path(out_dir) / "checkpoints"
    paths = sorted(ck_dir.glob("state_t*.qst"))
    if not paths:
        raise ConfigError(f"no checkpoints found under {ck_dir}")
    return paths[-1]


def resume(out_dir, steps=None):
    """Continue a run from its latest checkpoint, appending to its outputs.

    `steps`, when given, replaces the configured total step count.
    """
    out_dir = Path(out_dir)
    cfg = load_config(out_dir / "config.ini", {"out": str(out_dir)})
    if steps is not None:
        cfg.steps = int(steps)
    field, g = load_state(_latest_checkpoint(out_dir))
    if field.grid.L != cfg.grid.L or field.grid.dx != cfg.grid.dx or g != cfg.g:
        raise ConfigError(
            f"checkpoint (L={field.grid.L}, dx={field.grid.dx}, g={g}) does not match "
            f"config (L={cfg.grid.L}, dx={cfg.grid.dx}, g={cfg.g})"
        )
    if field.t >= cfg.steps:
        raise ConfigError(f"checkpoint is at t={field.t}, nothing to do for steps={cfg.steps}")

    records = _read_energy_records(out_dir / "energies.csv", up_to=field.t)
    spectrum_records = []
    vortex_sets = []
    out = _OutputTree(out_dir, append=True)
    try:
        _advance(cfg, field, records, spectrum_records, vortex_sets, out, cfg.steps)
        return _summarize(cfg, records, spectrum_records, vortex_sets, out)
    finally:
        out.close()


def _read_energy_records(path, up_to=None):
    records = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != diagnostics.ENERGY_HEADER:
            raise ConfigError(f"{path}: unexpected header {header!r}")
        for line in fh:
            bits = line.strip().split(",")
            if len(bits) != 8:
                continue
            t = int(bits[0])
            if up_to is not None and t > up_to:
                continue
            vals = [float(b) for b in bits[1:]]
            records.append(diagnostics.EnergyRecord(t, *vals))
    return records


def analyze(run_dir, out_dir=None):
    """Recompute spectra and vortex detections from stored field dumps."""
    run_dir = Path(run_dir)
    dumps = sorted(run_dir.glob("dumps/state_t*.qst")) or sorted(run_dir.glob("*.qst"))
    if not dumps:
        raise ConfigError(f"no field dumps found under {run_dir}")
    out = _OutputTree(out_dir or run_dir / "analysis", with_energies=False)
    vortex_sets = []
    n = 0
    for path in dumps:
        field, g = load_state(path)
        hydro = diagnostics.hydro_fields(field.psi, field.grid)
        rec = spectra.spectrum_record(hydro.qx, hydro.qy, field.grid, t=field.t)
        out.spectrum(rec)
        vset = vortex.detect_vortices(field.psi, t=field.t)
        out.vortices(vset)
        vortex_sets.append(vset)
        n += 1
    out.vortex_series(vortex.vortex_count_series(vortex_sets))
    return {"snapshots": n, "out": str(out.root)}


def read_spectrum_csv(path, t=None):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if t is None:
        name = Path(path).stem
        t = int(name.split("_t")[-1]) if "_t" in name else 0
    return spectra.SpectrumRecord(t, data[:, 0], data[:, 1], data[:, 2], math.nan)


def fit_stored_spectra(run_dir, window, which="ic"):
    """Power-law fits over every spectrum CSV stored by a run."""
    run_dir = Path(run_dir)
    paths = sorted(run_dir.glob("spectra/spectrum_t*.csv"))
    if not paths:
        paths = sorted(run_dir.glob("spectrum_t*.csv"))
    if not paths:
        raise ConfigError(f"no spectrum files found under {run_dir}")
    lo, hi = window
    rows, fits = [], []
    for path in paths:
        rec = read_spectrum_csv(path)
        try:
            fit = spectra.fit_powerlaw(rec, which, lo, hi)
        except ValueError:
            continue
        fits.append((rec.t, fit))
        rows.append(spectra.fit_row(rec.t, fit))
    with open(run_dir / "fits.csv", "w") as fh:
        fh.write(spectra.FIT_HEADER + "\n")
        if rows:
            fh.write("\n".join(rows) + "\n")
    return fits
