"""Binary checkpoints for the autoencoder, centroids and pooling projection.

Layout (all integers little-endian):

    magic        8 bytes  b"STATDEC\\x00"
    version      u32
    topology     u32 count + u32 widths, encoder then decoder
    activations  u8 per layer (0 identity, 1 relu), encoder then decoder
    flags        u32 (bit 0 centroids, bit 1 pooling)
    [centroids]  u32 K, u32 D
    [pooling]    u32 width, u32 num_clusters, u8 use_variance
    blobs        float64 little-endian: W, b per layer (encoder, decoder),
                 then centroids, then pooling projection and bias

A JSON `CheckpointManifest` is written next to the binary.
"""

import hashlib
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from statdec.errors import DataFormatError
from statdec.models.manifests import CheckpointManifest
from statdec.network.mlp import Autoencoder, Layer, MlpNetwork
from statdec.network.statpool import StatPoolLayer, feature_width
from statdec.numerics import Matrix

logger = logging.getLogger(__name__)

MAGIC = b"STATDEC\x00"
VERSION = 1

_ACTIVATION_CODES = {"identity": 0, "relu": 1}
_ACTIVATION_NAMES = {code: name for name, code in _ACTIVATION_CODES.items()}

FLAG_CENTROIDS = 1
FLAG_POOL = 2


@dataclass
class Checkpoint:
    autoencoder: Autoencoder
    centroids: Matrix | None = None
    pool: StatPoolLayer | None = None


def manifest_path(path: Path) -> Path:
    return Path(path).with_suffix(".json")


def _network_blobs(net: MlpNetwork) -> list[np.ndarray]:
    blobs: list[np.ndarray] = []
    for layer in net.layers:
        blobs.extend([layer.weight, layer.bias])
    return blobs


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    """Serialize a checkpoint to bytes."""
    ae = checkpoint.autoencoder
    parts = [MAGIC, struct.pack("<I", VERSION)]
    for net in (ae.encoder, ae.decoder):
        topology = net.topology
        parts.append(struct.pack(f"<I{len(topology)}I", len(topology), *topology))
    for net in (ae.encoder, ae.decoder):
        codes = [_ACTIVATION_CODES[name] for name in net.activations]
        parts.append(struct.pack(f"<{len(codes)}B", *codes))

    flags = 0
    if checkpoint.centroids is not None:
        flags |= FLAG_CENTROIDS
    if checkpoint.pool is not None:
        flags |= FLAG_POOL
    parts.append(struct.pack("<I", flags))
    if checkpoint.centroids is not None:
        parts.append(struct.pack("<II", *checkpoint.centroids.shape))
    if checkpoint.pool is not None:
        pool = checkpoint.pool
        parts.append(struct.pack("<IIB", pool.width, pool.num_clusters, int(pool.use_variance)))

    blobs = _network_blobs(ae.encoder) + _network_blobs(ae.decoder)
    if checkpoint.centroids is not None:
        blobs.append(checkpoint.centroids)
    if checkpoint.pool is not None:
        blobs.extend([checkpoint.pool.proj, checkpoint.pool.proj_bias])
    parts.extend(np.ascontiguousarray(blob, dtype="<f8").tobytes() for blob in blobs)
    return b"".join(parts)


class _Reader:
    """Cursor over a byte buffer that reports truncation with its offset."""

    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise DataFormatError("checkpoint is truncated", offset=self.offset)
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def floats(self, shape: tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape))
        raw = self.take(8 * count)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)


def decode_checkpoint(data: bytes) -> Checkpoint:
    """Parse bytes produced by `encode_checkpoint`.

    Raises:
        DataFormatError: On a bad magic, unknown version, or truncation.
    """
    reader = _Reader(data)
    if reader.take(len(MAGIC)) != MAGIC:
        raise DataFormatError("not a statdec checkpoint (bad magic)", offset=0)
    (version,) = reader.unpack("<I")
    if version != VERSION:
        raise DataFormatError(f"unsupported checkpoint version {version}", offset=len(MAGIC))

    topologies = []
    for _ in range(2):
        (count,) = reader.unpack("<I")
        topologies.append(list(reader.unpack(f"<{count}I")))
    activations = []
    for topology in topologies:
        codes = reader.unpack(f"<{len(topology) - 1}B")
        try:
            activations.append([_ACTIVATION_NAMES[code] for code in codes])
        except KeyError as e:
            raise DataFormatError(f"unknown activation code {e}", offset=reader.offset) from e

    (flags,) = reader.unpack("<I")
    centroid_shape = reader.unpack("<II") if flags & FLAG_CENTROIDS else None
    pool_header = reader.unpack("<IIB") if flags & FLAG_POOL else None

    networks = []
    for topology, names in zip(topologies, activations, strict=True):
        layers = []
        for fan_in, fan_out, name in zip(topology[:-1], topology[1:], names, strict=True):
            weight = reader.floats((fan_in, fan_out))
            bias = reader.floats((fan_out,))
            layers.append(Layer(weight, bias, name))
        networks.append(MlpNetwork(layers))

    centroids = reader.floats(centroid_shape) if centroid_shape else None
    pool = None
    if pool_header:
        width, num_clusters, use_variance = pool_header
        proj = reader.floats((feature_width(width), width))
        bias = reader.floats((width,))
        pool = StatPoolLayer(proj, bias, num_clusters, bool(use_variance))
    if reader.offset != len(data):
        raise DataFormatError("trailing bytes after checkpoint payload", offset=reader.offset)
    return Checkpoint(Autoencoder(networks[0], networks[1]), centroids, pool)


def save_checkpoint(
    path: Path, checkpoint: Checkpoint, seed: int, iterations: int
) -> CheckpointManifest:
    """Write the binary and its JSON manifest, each via temp file + rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = encode_checkpoint(checkpoint)
    ae = checkpoint.autoencoder
    manifest = CheckpointManifest(
        encoder_topology=ae.encoder.topology,
        decoder_topology=ae.decoder.topology,
        encoder_activations=ae.encoder.activations,
        decoder_activations=ae.decoder.activations,
        seed=seed,
        iterations=iterations,
        has_centroids=checkpoint.centroids is not None,
        has_pool=checkpoint.pool is not None,
        sha256=hashlib.sha256(payload).hexdigest(),
    )
    _atomic_write(path, payload)
    _atomic_write(manifest_path(path), manifest.model_dump_json(indent=2).encode("utf-8"))
    logger.info(f"Checkpoint written: {path} ({len(payload):,} bytes)")
    return manifest


def load_checkpoint(path: Path) -> tuple[Checkpoint, CheckpointManifest | None]:
    """Read a checkpoint and, when present, its manifest.

    Raises:
        FileNotFoundError: If the binary does not exist.
        DataFormatError: If the binary is malformed or does not match its manifest digest.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    payload = path.read_bytes()
    manifest = None
    sidecar = manifest_path(path)
    if sidecar.exists():
        manifest = CheckpointManifest.model_validate_json(sidecar.read_text(encoding="utf-8"))
        if manifest.sha256 != hashlib.sha256(payload).hexdigest():
            raise DataFormatError(f"{path} does not match the digest in {sidecar.name}")
    return decode_checkpoint(payload), manifest


def _atomic_write(path: Path, payload: bytes) -> None:
    temp = path.with_suffix(path.suffix + ".tmp")
    try:
        temp.write_bytes(payload)
        temp.replace(path)
    except Exception:
        temp.unlink(missing_ok=True)
        raise
