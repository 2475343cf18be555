# Copyright 2026 The nvcodec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""3 kbps streaming neural speech codec.

Audio is passed as 1-D float32 numpy arrays at 16 kHz; bitstreams and weight
files are bytes.

    w = nvcodec.Weights.build("small", seed=0)
    codec = nvcodec.Codec(w)
    stream = codec.encode(audio)
    decoded = codec.decode(stream, seed=0)
"""

from nvcodec._core import (
    BITRATE_BPS,
    FRAME_BITS,
    FRAME_RATE_HZ,
    REGIMES,
    SAMPLE_RATE_HZ,
    Codec,
    Error,
    FormatError,
    InvalidArgumentError,
    IoError,
    MissingTensorError,
    ShapeError,
    UnsupportedRateError,
    Weights,
    bitstream_info,
    features,
    mix,
    qmf_analyze,
    qmf_delay,
    qmf_synthesize,
    read_wav,
    si_snr,
    si_snr_improvement,
    synthetic_noise,
    synthetic_speech,
    write_wav,
)

__all__ = [
    "BITRATE_BPS",
    "FRAME_BITS",
    "FRAME_RATE_HZ",
    "REGIMES",
    "SAMPLE_RATE_HZ",
    "Codec",
    "Error",
    "FormatError",
    "InvalidArgumentError",
    "IoError",
    "MissingTensorError",
    "ShapeError",
    "UnsupportedRateError",
    "Weights",
    "bitstream_info",
    "features",
    "mix",
    "qmf_analyze",
    "qmf_delay",
    "qmf_synthesize",
    "read_wav",
    "si_snr",
    "si_snr_improvement",
    "synthetic_noise",
    "synthetic_speech",
    "write_wav",
]
