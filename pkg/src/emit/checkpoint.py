"""
Binary checkpoints.

Layout: magic ``VISA1``, then little-endian int64 header
[env code, chain size, episode length, embed dim, n sets, per set: activation code, n layers,
(out, in) per layer], then every parameter as little-endian float64 in the
order psi, phi, phi_hat, policy trunk.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.actor.policy import PolicyParams
from src.contracts.errors import CheckpointError
from src.contracts.schemas import EnvName
from src.contrastive.encoders import EncoderSet
from src.numerics import Layer, ParamSet

logger = logging.getLogger(__name__)

MAGIC = b"VISA1"
ENV_CODES: dict[EnvName, int] = {
    EnvName.POINT_REACH: 0,
    EnvName.POINT_REACH_WALL: 1,
    EnvName.VALVE_TURN: 2,
    EnvName.CHAIN: 3,
}
ACTIVATION_CODES = {"relu": 0, "tanh": 1}
_I64 = np.dtype("<i8")
_F64 = np.dtype("<f8")


@dataclass(frozen=True)
class Checkpoint:
    """Everything needed to rebuild the critic and the policy."""

    env: EnvName
    chain_states: int
    episode_len: int
    encoders: EncoderSet
    policy: PolicyParams

    @property
    def embed_dim(self) -> int:
        return self.encoders.embed_dim

    def param_sets(self) -> list[ParamSet]:
        return [*self.encoders.as_list(), self.policy.trunk]


def save_checkpoint(checkpoint: Checkpoint, path: str | Path) -> Path:
    """Write ``checkpoint`` to ``path``."""
    sets = checkpoint.param_sets()
    header: list[int] = [
        ENV_CODES[checkpoint.env],
        checkpoint.chain_states,
        checkpoint.episode_len,
        checkpoint.embed_dim,
        len(sets),
    ]
    for ps in sets:
        header += [ACTIVATION_CODES[ps.activation], len(ps.layers)]
        for layer in ps.layers:
            header += [layer.out_dim, layer.in_dim]

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = np.concatenate([ps.flatten() for ps in sets]).astype(_F64)
    with open(out, "wb") as f:
        f.write(MAGIC)
        f.write(np.asarray(header, dtype=_I64).tobytes())
        f.write(payload.tobytes())
    logger.debug(f"Saved checkpoint with {payload.size} parameters to {out}")
    return out


class _Reader:
    def __init__(self, data: bytes, source: Path) -> None:
        self._data = data
        self._pos = 0
        self._source = source

    def ints(self, n: int) -> list[int]:
        return [int(v) for v in self._take(n, _I64)]

    def floats(self, n: int) -> np.ndarray:
        return self._take(n, _F64).astype(np.float64)

    def _take(self, n: int, dtype: np.dtype) -> np.ndarray:
        size = n * dtype.itemsize
        if n < 0 or self._pos + size > len(self._data):
            raise CheckpointError(f"checkpoint {self._source} is truncated")
        out = np.frombuffer(self._data, dtype=dtype, count=n, offset=self._pos)
        self._pos += size
        return out

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._data)


def load_checkpoint(
    path: str | Path,
    action_low: float = -1.0,
    action_high: float = 1.0,
) -> Checkpoint:
    """
    Read a checkpoint written by ``save_checkpoint``.

    Raises:
        CheckpointError: Missing file, wrong magic, or truncated/oversized payload.
    """
    source = Path(path)
    try:
        data = source.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {source}: {e}") from e
    if not data.startswith(MAGIC):
        raise CheckpointError(f"{source} is not a VISA1 checkpoint")

    reader = _Reader(data[len(MAGIC) :], source)
    env_code, chain_states, episode_len, embed_dim, n_sets = reader.ints(5)
    codes = {v: k for k, v in ENV_CODES.items()}
    activations = {v: k for k, v in ACTIVATION_CODES.items()}
    if env_code not in codes or n_sets != 4:
        raise CheckpointError(f"{source}: unsupported header (env={env_code}, sets={n_sets})")
    if episode_len < 2:
        raise CheckpointError(f"{source}: invalid episode length {episode_len}")

    structure: list[tuple[str, list[tuple[int, int]]]] = []
    for _ in range(n_sets):
        act_code, n_layers = reader.ints(2)
        if act_code not in activations or n_layers < 1:
            raise CheckpointError(f"{source}: corrupt parameter-set header")
        shapes = reader.ints(2 * n_layers)
        structure.append((activations[act_code], list(zip(shapes[::2], shapes[1::2], strict=True))))

    sets: list[ParamSet] = []
    for activation, shapes in structure:
        layers = []
        for out_dim, in_dim in shapes:
            weight = reader.floats(out_dim * in_dim).reshape(out_dim, in_dim).copy()
            bias = reader.floats(out_dim).copy()
            layers.append(Layer(weight, bias))
        sets.append(ParamSet(layers, activation))  # type: ignore[arg-type]
    if not reader.exhausted:
        raise CheckpointError(f"{source}: trailing bytes after parameters")

    encoders = EncoderSet.from_list(sets[:3])
    if encoders.embed_dim != embed_dim:
        raise CheckpointError(f"{source}: header embed dim {embed_dim} != {encoders.embed_dim}")
    return Checkpoint(
        env=codes[env_code],
        chain_states=chain_states,
        episode_len=episode_len,
        encoders=encoders,
        policy=PolicyParams(sets[3], action_low, action_high),
    )
