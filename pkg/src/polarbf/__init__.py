"""Polar-code BP decoding with critical-set and learned bit flipping."""

from .polar import (
    CodeConfig,
    construct_code,
    code_from_frozen_set,
    bhattacharyya_parameters,
    bit_reversal_permutation,
    encode,
    assemble_u,
    extract_payload,
    crc_attach,
    crc_check,
    read_frozen_set_file,
    write_frozen_set_file,
)
from .bp import DecoderConfig, minsum, channel_llrs, init_priors, run_bp, run_bp_batch
from .channel import (
    ChannelConfig,
    noise_sigma,
    transmit,
    transmit_batch,
    random_payloads,
)
from .features import build_input_tensor
from .flip import (
    DecodeOutcome,
    build_critical_set,
    cs_attempt_order,
    flip_order,
    cs_bf_decode,
    cnn_bf_decode,
    label_frame,
    label_frames_batch,
    run_flip_attempts,
)
from .dataset import Dataset, read_dataset, write_dataset, concat_datasets
from .nn import FlipPredictor, ModelConfig, TrainConfig, load_weights, save_weights, train

__version__ = "0.1.0"
