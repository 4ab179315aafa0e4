"""Run configuration, diagnostics records and the on-disk formats."""

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .dynamics import FluidState
from .errors import ConfigError

CSV_VERSION = "sgfluid-diagnostics v1"
CSV_COLUMNS = ("t", "area", "min_A1", "eps_sup", "constraint_defect",
               "projection_magnitude")
CHECKPOINT_VERSION = 1


def _modes_from_json(value, name):
    """Accept {"2": [re, im]} / {"2": 1.0} / [[mode, re, im], ...]."""
    if value is None:
        return None
    out = {}
    try:
        if isinstance(value, dict):
            for k, v in value.items():
                out[int(k)] = complex(*v) if isinstance(v, (list, tuple)) else complex(v)
        else:
            for row in value:
                m, re, im = row
                out[int(m)] = complex(re, im)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: cannot parse Fourier modes ({exc})") from exc
    return out


@dataclass
class SimConfig:
    resolution: int = 128
    epsilon: float = 0.05
    omega0: float = 0.5
    dt: float = 1e-3
    t_end: float = 1.0
    output_every: float = 0.1
    checkpoint_every: float = 0.0
    f: dict = None
    g: dict = None
    v0: complex = 0.0
    threads: int = 1
    lifespan_eps: list = field(default_factory=lambda: [0.2, 0.1, 0.05])
    lifespan_threshold: float = 0.5
    lifespan_t_max: float = 400.0
    lifespan_dt: float = 1e-2
    lifespan_resolution: int = 64

    def __post_init__(self):
        self.validate()

    def validate(self):
        n = self.resolution
        if not isinstance(n, (int, np.integer)) or n < 32 or n % 2:
            raise ConfigError(f"resolution: must be an even integer >= 32, got {n!r}")
        if not np.isfinite(self.omega0) or self.omega0 ** 2 >= np.pi:
            raise ConfigError(f"omega0: need omega0**2 < pi, got {self.omega0!r}")
        if not (self.epsilon >= 0):
            raise ConfigError(f"epsilon: must be >= 0, got {self.epsilon!r}")
        for name in ("dt", "t_end", "output_every", "lifespan_dt", "lifespan_t_max"):
            v = getattr(self, name)
            if not (v > 0) or not np.isfinite(v):
                raise ConfigError(f"{name}: must be positive, got {v!r}")
        if self.checkpoint_every < 0:
            raise ConfigError("checkpoint_every: must be >= 0")
        if self.threads < 1:
            raise ConfigError(f"threads: must be >= 1, got {self.threads!r}")
        if any(not (e > 0) for e in self.lifespan_eps):
            raise ConfigError("lifespan_eps: every entry must be positive")
        m = self.lifespan_resolution
        if m < 32 or m % 2:
            raise ConfigError("lifespan_resolution: must be an even integer >= 32")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        for key in ("f", "g"):
            if key in d:
                d[key] = _modes_from_json(d[key], key)
        if "v0" in d and isinstance(d["v0"], (list, tuple)):
            d["v0"] = complex(*d["v0"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(data)

    def to_dict(self):
        d = asdict(self)
        for key in ("f", "g"):
            if d[key] is not None:
                d[key] = [[m, c.real, c.imag] for m, c in sorted(d[key].items())]
        d["v0"] = [complex(self.v0).real, complex(self.v0).imag]
        return d


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    area: float
    min_A1: float
    eps_sup: float
    constraint_defect: float
    projection_magnitude: float

    def row(self):
        return ",".join(repr(float(getattr(self, c))) for c in CSV_COLUMNS)


def write_csv_header(fh):
    fh.write(f"# {CSV_VERSION}\n")
    fh.write(",".join(CSV_COLUMNS) + "\n")


def read_csv(path):
    """Parse a diagnostics file back into records (header comment checked)."""
    with open(path) as fh:
        first = fh.readline().strip()
        if first != f"# {CSV_VERSION}":
            raise ConfigError(f"{path}: unexpected header {first!r}")
        cols = tuple(fh.readline().strip().split(","))
        if cols != CSV_COLUMNS:
            raise ConfigError(f"{path}: unexpected columns {cols}")
        return [DiagnosticsRecord(*map(float, line.split(","))) for line in fh if line.strip()]


def _pairs(a):
    return [[float(x.real), float(x.imag)] for x in np.asarray(a, dtype=complex)]


def _unpairs(rows):
    arr = np.asarray(rows, dtype=float)
    return arr[:, 0] + 1j * arr[:, 1]


def checkpoint_dumps(s):
    """JSON text of a state. Python floats serialize with 17 significant digits
    or fewer via repr, which round-trips exactly."""
    d = {"version": CHECKPOINT_VERSION, "t": float(s.t), "omega0": float(s.omega0),
         "N": s.n, "Z": _pairs(s.Z), "Zt": _pairs(s.Zt)}
    if s.labels is not None:
        d["labels"] = [float(x) for x in s.labels]
    return json.dumps(d)


def checkpoint_loads(text):
    try:
        d = json.loads(text)
        Z, Zt = _unpairs(d["Z"]), _unpairs(d["Zt"])
        n = int(d["N"])
        labels = np.asarray(d["labels"], dtype=float) if "labels" in d else None
        if len(Z) != n or len(Zt) != n:
            raise ConfigError("checkpoint: array length does not match N")
        return FluidState(Z, Zt, float(d["omega0"]), float(d["t"]), labels)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"checkpoint: {exc}") from exc


def write_report(path, records):
    with open(path, "w") as fh:
        json.dump(records, fh, indent=2)
