"""
PixInfo Shared Record Schemas

Versioned dataclasses for records that cross module boundaries: the run
configuration built by the CLI, synthetic generator descriptors, per-k
information reports and invariant-breach records.

schema_version: "1.0"

Usage:
    from schemas import (
        RunConfig,
        GeneratorSpec,
        InfoReport,
        BreachRecord,
        validate_and_log,
        SchemaValidationError,
        SCHEMA_VERSION,
    )

Producers:
    report = InfoReport(...)
    writer.writerow(report.to_dict())

Consumers:
    spec = validate_and_log(GeneratorSpec, payload, context="check:battery")
    if spec is None:
        continue  # validation failure already logged
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Tuple

SCHEMA_VERSION = "1.0"

logger = logging.getLogger(__name__)

SPLITTER_CHOICES = ("otsu", "balanced", "merge", "all")
GENERATOR_KINDS = ("constant", "ramp", "two_gaussians", "histogram_exact")


class SchemaValidationError(ValueError):
    """Raised when a record payload fails schema validation."""


# ---------------------------------------------------------------------------
# Record: generator descriptor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    """Descriptor of a synthetic test image.

    String form (CLI ``--synth``)::

        constant:5
        ramp:4
        two_gaussians:80,170,20,0.5
        histogram_exact:0=2,1=1,3=1
    """

    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_string(cls, text: str) -> "GeneratorSpec":
        kind, _, rest = text.strip().partition(":")
        kind = kind.strip().lower()
        args = [a.strip() for a in rest.split(",") if a.strip()]
        try:
            if kind == "constant":
                if len(args) != 1:
                    raise SchemaValidationError("constant expects one value: constant:<v>")
                params: Dict[str, Any] = {"value": int(args[0])}
            elif kind == "ramp":
                if len(args) != 1:
                    raise SchemaValidationError("ramp expects one value: ramp:<levels>")
                params = {"levels": int(args[0])}
            elif kind == "two_gaussians":
                if len(args) != 4:
                    raise SchemaValidationError(
                        "two_gaussians expects four values: two_gaussians:<mu1>,<mu2>,<sigma>,<mix>"
                    )
                mu1, mu2, sigma, mix = (float(a) for a in args)
                params = {"mu1": mu1, "mu2": mu2, "sigma": sigma, "mix": mix}
            elif kind == "histogram_exact":
                counts: Dict[int, int] = {}
                for item in args:
                    level, _, count = item.partition("=")
                    counts[int(level)] = int(count)
                params = {"counts": counts}
            else:
                raise SchemaValidationError(
                    f"GeneratorSpec.kind must be one of {set(GENERATOR_KINDS)}, got '{kind}'"
                )
        except ValueError as exc:
            if isinstance(exc, SchemaValidationError):
                raise
            raise SchemaValidationError(f"Malformed generator descriptor '{text}': {exc}") from exc
        return cls.from_dict({"kind": kind, "params": params})

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GeneratorSpec":
        if "kind" not in data:
            raise SchemaValidationError("GeneratorSpec missing required fields: {'kind'}")
        kind = str(data["kind"]).lower()
        params = dict(data.get("params", {}))
        maxval = int(params.get("maxval", 255))
        if not (1 <= maxval <= 65535):
            raise SchemaValidationError(f"GeneratorSpec.maxval must be in [1, 65535], got {maxval}")

        if kind == "constant":
            value = int(params.get("value", -1))
            if not (0 <= value <= maxval):
                raise SchemaValidationError(
                    f"constant value must be in [0, {maxval}], got {value}"
                )
        elif kind == "ramp":
            levels = int(params.get("levels", 0))
            if not (1 <= levels <= maxval + 1):
                raise SchemaValidationError(
                    f"ramp levels must be in [1, {maxval + 1}], got {levels}"
                )
        elif kind == "two_gaussians":
            for key in ("mu1", "mu2"):
                mu = float(params.get(key, -1.0))
                if not (0.0 <= mu <= maxval):
                    raise SchemaValidationError(f"two_gaussians.{key} must be in [0, {maxval}], got {mu}")
            if float(params.get("sigma", 0.0)) <= 0:
                raise SchemaValidationError("two_gaussians.sigma must be > 0")
            mix = float(params.get("mix", -1.0))
            if not (0.0 <= mix <= 1.0):
                raise SchemaValidationError(f"two_gaussians.mix must be in [0, 1], got {mix}")
        elif kind == "histogram_exact":
            counts = {int(k): int(v) for k, v in dict(params.get("counts", {})).items()}
            bad = [k for k, v in counts.items() if k < 0 or k > 65535 or v < 0]
            if bad:
                raise SchemaValidationError(
                    f"histogram_exact levels must be in [0, 65535] with counts >= 0, offending levels: {sorted(bad)}"
                )
            if sum(counts.values()) <= 0:
                raise SchemaValidationError("histogram_exact needs a positive total pixel count")
            params["counts"] = counts
        else:
            raise SchemaValidationError(
                f"GeneratorSpec.kind must be one of {set(GENERATOR_KINDS)}, got '{kind}'"
            )
        return cls(
            kind=kind,
            params=params,
            schema_version=str(data.get("schema_version", SCHEMA_VERSION)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Record: run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Resolved CLI configuration. Exactly one of input_path / synth is set."""

    command: str
    input_path: Optional[str] = None
    synth: Optional[GeneratorSpec] = None
    size: Optional[Tuple[int, int]] = None   # None = generator default
    splitter: str = "otsu"
    k_max: Optional[int] = None
    seed: int = 0
    volume_bits: Optional[int] = None   # None = auto (8 if maxval <= 255 else 16)
    out_dir: Optional[str] = None
    dump: bool = False
    ks: List[int] = field(default_factory=list)
    recompute: bool = False
    compact: bool = False
    battery_path: Optional[str] = None   # check only: JSONL of generator descriptors
    schema_version: str = SCHEMA_VERSION

    @property
    def splitters(self) -> List[str]:
        if self.splitter == "all":
            return ["otsu", "merge", "balanced"]
        return [self.splitter]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        if "command" not in data:
            raise SchemaValidationError("RunConfig missing required fields: {'command'}")

        input_path = data.get("input_path")
        synth = data.get("synth")
        if isinstance(synth, str):
            synth = GeneratorSpec.from_string(synth)
        elif isinstance(synth, dict):
            synth = GeneratorSpec.from_dict(synth)
        if data["command"] != "check" and (input_path is None) == (synth is None):
            raise SchemaValidationError("RunConfig needs exactly one input source: --input or --synth")
        if input_path is not None and synth is not None:
            raise SchemaValidationError("RunConfig needs exactly one input source: --input or --synth")
        battery_path = data.get("battery_path")
        if battery_path is not None and (input_path is not None or synth is not None):
            raise SchemaValidationError("RunConfig.battery_path excludes --input and --synth")

        splitter = str(data.get("splitter", "otsu")).lower()
        if splitter not in SPLITTER_CHOICES:
            raise SchemaValidationError(
                f"RunConfig.splitter must be one of {set(SPLITTER_CHOICES)}, got '{splitter}'"
            )

        k_max = data.get("k_max")
        if k_max is not None:
            k_max = int(k_max)
            if k_max < 1:
                raise SchemaValidationError(f"RunConfig.k_max must be >= 1, got {k_max}")

        volume_bits = data.get("volume_bits")
        if volume_bits in (None, "auto"):
            volume_bits = None
        else:
            volume_bits = int(volume_bits)
            if volume_bits not in (8, 16):
                raise SchemaValidationError(
                    f"RunConfig.volume_bits must be one of {{auto, 8, 16}}, got {volume_bits}"
                )

        size = data.get("size")
        if isinstance(size, str):
            width, _, height = size.lower().partition("x")
            try:
                size = (int(width), int(height))
            except ValueError as exc:
                raise SchemaValidationError(f"RunConfig.size must look like WxH, got '{size}'") from exc
        if size is not None:
            size = (int(size[0]), int(size[1]))
            if size[0] < 1 or size[1] < 1:
                raise SchemaValidationError(f"RunConfig.size must be positive, got {size}")

        ks = [int(k) for k in data.get("ks") or []]
        if any(k < 1 for k in ks):
            raise SchemaValidationError(f"RunConfig.ks must all be >= 1, got {ks}")

        return cls(
            command=str(data["command"]),
            input_path=input_path,
            synth=synth,
            size=size,
            splitter=splitter,
            k_max=k_max,
            seed=int(data.get("seed", 0)),
            volume_bits=volume_bits,
            out_dir=data.get("out_dir"),
            dump=bool(data.get("dump", False)),
            ks=ks,
            recompute=bool(data.get("recompute", False)),
            compact=bool(data.get("compact", False)),
            battery_path=battery_path,
            schema_version=str(data.get("schema_version", SCHEMA_VERSION)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Record: information report (one CSV row of ``info``)
# ---------------------------------------------------------------------------

INFO_COLUMNS = [
    "k", "Q_hartley", "Q_shannon", "Q_integer",
    "pct_hartley", "pct_shannon", "pct_integer",
]


@dataclass
class InfoReport:
    """Hartley, Shannon and integer totals for one k-cluster approximation."""

    k: int
    n_pixels: int
    g: int
    q_hartley: float
    q_shannon: float
    q_integer: int
    pct_hartley: float
    pct_shannon: float
    pct_integer: float
    splitter: str = ""
    q_integer_recomputed: Optional[int] = None
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.q_integer < 0 or self.q_hartley < 0 or self.q_shannon < -1e-9:
            raise SchemaValidationError(
                f"InfoReport totals must be >= 0, got "
                f"hartley={self.q_hartley} shannon={self.q_shannon} integer={self.q_integer}"
            )

    def to_row(self) -> Dict[str, Any]:
        row = {
            "k": self.k,
            "Q_hartley": self.q_hartley,
            "Q_shannon": self.q_shannon,
            "Q_integer": self.q_integer,
            "pct_hartley": self.pct_hartley,
            "pct_shannon": self.pct_shannon,
            "pct_integer": self.pct_integer,
        }
        if self.q_integer_recomputed is not None:
            row["Q_integer_recomputed"] = self.q_integer_recomputed
        return row

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Record: invariant breach (one JSONL line of ``check``)
# ---------------------------------------------------------------------------

@dataclass
class BreachRecord:
    """A failed hard invariant, with enough context to reproduce it."""

    check: str
    message: str
    splitter: str = ""
    instance: Dict[str, Any] = field(default_factory=dict)
    logged_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BreachRecord":
        required = {"check", "message"}
        missing = required - data.keys()
        if missing:
            raise SchemaValidationError(f"BreachRecord missing required fields: {missing}")
        return cls(
            check=str(data["check"]),
            message=str(data["message"]),
            splitter=str(data.get("splitter", "")),
            instance=dict(data.get("instance", {})),
            logged_at=str(data.get("logged_at", datetime.now(timezone.utc).isoformat())),
            schema_version=str(data.get("schema_version", SCHEMA_VERSION)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Validation helper
# ---------------------------------------------------------------------------

def validate_and_log(
    record_cls: type,
    data: Dict[str, Any],
    context: str = "",
) -> Optional[Any]:
    """Build *record_cls* from an untrusted payload, or log why not.

    Used when a batch of descriptors is read from disk (``check --battery``):
    one bad line should cost a warning naming the file and line in *context*,
    not the whole run. Returns the record, or None when the payload is rejected.
    """
    try:
        return record_cls.from_dict(data)
    except SchemaValidationError as exc:
        reason = str(exc)
    except (TypeError, ValueError) as exc:
        # from_dict coerces fields with int()/float(); wrong JSON types land here
        reason = f"{type(exc).__name__}: {exc}"
    logger.warning(
        "[%s] rejected %s (kind=%s, keys=%s): %s",
        context,
        record_cls.__name__,
        data.get("kind", "-"),
        sorted(data.keys()),
        reason,
    )
    return None

